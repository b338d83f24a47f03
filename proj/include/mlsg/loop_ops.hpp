#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mlsg/core.hpp"
#include "mlsg/path.hpp"

namespace mlsg {

/// Outcome of conjugating a cyclically reduced loop through a path.
struct ConjugatedLoop {
    EdgeLoop loop;           // the reduced based loop at start(p)
    bool gammaReversed;      // true when gamma had to be reversed to retain p
    bool orientationAmbiguous;  // both orientations begin with p (palindromic gamma)
};

/// The reduced based loop freely obtained from p · gamma · p^(-1), where
/// gamma is a cyclically reduced loop based at head(p).  The result passes
/// through head(p), and after orienting gamma suitably it coincides with p
/// on its initial segment; both orientations are tried and the one matching
/// p is returned, with a flag when the choice is ambiguous.
inline ConjugatedLoop reduced_loop_through(const MetricGraph& g, const EdgePath& p,
                                           const EdgeLoop& gamma) {
    if (!is_reduced(p)) throw std::invalid_argument("conjugating path must be reduced");
    if (!is_cyclically_reduced(gamma))
        throw std::invalid_argument("gamma must be cyclically reduced");
    if (!gamma.empty() && gamma.base() != p.head(g))
        throw GraphStructureError("gamma must be based at head of p");

    EdgePath pInv = reverse_path(g, p);
    auto build = [&](const EdgeLoop& gam) {
        return EdgeLoop(reduce(concat(g, concat(g, p, gam.path), pInv)));
    };
    EdgeLoop fwd = build(gamma);
    if (gamma.empty()) return {fwd, false, false};

    EdgeLoop bwd = build(EdgeLoop(reverse_path(g, gamma.path)));
    auto startsWithP = [&](const EdgeLoop& l) {
        if (l.size() < p.size()) return false;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (l.path.steps[i] != p.steps[i]) return false;
        return true;
    };
    bool fwdMatches = startsWithP(fwd);
    bool bwdMatches = startsWithP(bwd);
    if (p.empty() || fwdMatches) return {fwd, false, fwdMatches && bwdMatches};
    if (bwdMatches) return {bwd, true, false};
    throw std::logic_error("reduced_loop_through: neither orientation retains p");
}

/// Deterministic non-backtracking closure: the lexicographically least
/// shortest walk from the end of `p` back to its start such that appending
/// it to `p` yields a cyclically reduced loop.  Returns nothing when no
/// closure exists (possible only outside core graphs).
inline std::optional<EdgeLoop> close_to_cyclic_loop(const MetricGraph& g, const EdgePath& p,
                                                    const std::vector<HalfEdge>& forbiddenArrivals = {}) {
    if (p.empty() || !is_reduced(p)) throw std::invalid_argument("closure needs a nonempty reduced path");

    auto arrivalOk = [&](const HalfEdge& t) {
        if (t == p.steps.front().reverse()) return false;
        for (const HalfEdge& f : forbiddenArrivals)
            if (t == f) return false;
        return true;
    };

    if (p.head(g) == p.start && arrivalOk(p.steps.back()))
        return EdgeLoop(p);

    // BFS over (position germ) states = half-edges just traversed; visiting
    // germs in sorted order makes the first-found parent the lexicographically
    // least among shortest closures.
    const std::size_t stateCount = 2 * g.edge_count();
    auto stateIndex = [](const HalfEdge& h) {
        return 2 * static_cast<std::size_t>(h.edge) + static_cast<std::size_t>(h.dir);
    };
    std::vector<HalfEdge> parent(stateCount, HalfEdge());
    std::vector<bool> visited(stateCount, false);
    std::deque<HalfEdge> frontier;

    HalfEdge last = p.steps.back();
    std::optional<HalfEdge> goal;
    auto visit = [&](const HalfEdge& from, const HalfEdge& next) {
        std::size_t idx = stateIndex(next);
        if (visited[idx]) return;
        visited[idx] = true;
        parent[idx] = from;
        frontier.push_back(next);
        if (!goal && g.head(next) == p.start && arrivalOk(next)) goal = next;
    };

    for (const HalfEdge& h : g.germs(p.head(g)))
        if (h != last.reverse()) visit(last, h);

    while (!goal && !frontier.empty()) {
        HalfEdge cur = frontier.front();
        frontier.pop_front();
        for (const HalfEdge& h : g.germs(g.head(cur)))
            if (h != cur.reverse()) visit(cur, h);
    }
    if (!goal) return std::nullopt;

    std::vector<HalfEdge> walk;
    HalfEdge cur = *goal;
    while (cur != last) {
        walk.push_back(cur);
        cur = parent[stateIndex(cur)];
    }
    EdgeLoop out(p);
    out.path.steps.insert(out.path.steps.end(), walk.rbegin(), walk.rend());
    return out;
}

/// Extends a reduced path with endpoints in the core to a cyclically
/// reduced loop containing it as a contiguous subpath (the graph form of
/// extending geodesic paths to geodesic loops).  The search always picks
/// the least available half-edge, so results are deterministic.
inline EdgeLoop extend_to_geodesic_loop(const CoreGraph& c, const EdgePath& p) {
    const MetricGraph& g = c.graph();
    if (p.empty()) throw std::invalid_argument("cannot extend an empty path");
    validate_path(g, p);
    if (!is_reduced(p)) throw std::invalid_argument("path must be reduced");

    std::optional<EdgeLoop> loop = close_to_cyclic_loop(g, p);
    if (!loop) throw std::logic_error("extend_to_geodesic_loop: no closure in core graph");
    return *loop;
}

}  // namespace mlsg
