#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlsg/graph.hpp"

namespace mlsg {

/// Edge path: a start vertex followed by a chain of incident half-edges.
/// The empty sequence is the constant path at `start`.
struct EdgePath {
    VertexId start = kNoVertex;
    std::vector<HalfEdge> steps;

    EdgePath() = default;
    explicit EdgePath(VertexId s) : start(s) {}
    EdgePath(VertexId s, std::vector<HalfEdge> st) : start(s), steps(std::move(st)) {}

    bool empty() const { return steps.empty(); }
    std::size_t size() const { return steps.size(); }

    VertexId head(const MetricGraph& g) const {
        return steps.empty() ? start : g.head(steps.back());
    }

    friend bool operator==(const EdgePath& a, const EdgePath& b) {
        return a.start == b.start && a.steps == b.steps;
    }
    friend bool operator!=(const EdgePath& a, const EdgePath& b) { return !(a == b); }
};

inline void validate_path(const MetricGraph& g, const EdgePath& p) {
    if (p.start >= g.vertex_count()) throw GraphStructureError("path start not in graph");
    VertexId at = p.start;
    for (const HalfEdge& h : p.steps) {
        if (h.edge >= g.edge_count()) throw GraphStructureError("path step not in graph");
        if (g.tail(h) != at) throw GraphStructureError("path steps are not incident");
        at = g.head(h);
    }
}

inline EdgePath path_from_steps(const MetricGraph& g, const std::vector<HalfEdge>& steps) {
    if (steps.empty()) throw GraphStructureError("cannot infer start of empty path");
    EdgePath p(g.tail(steps.front()), steps);
    validate_path(g, p);
    return p;
}

inline Rational path_length(const MetricGraph& g, const EdgePath& p) {
    Rational total;
    for (const HalfEdge& h : p.steps) total += g.length(h);
    return total;
}

inline EdgePath reverse_path(const MetricGraph& g, const EdgePath& p) {
    EdgePath r(p.head(g));
    r.steps.reserve(p.steps.size());
    for (auto it = p.steps.rbegin(); it != p.steps.rend(); ++it) r.steps.push_back(it->reverse());
    return r;
}

/// Raw concatenation p then q; requires head(p) == start(q).
inline EdgePath concat(const MetricGraph& g, const EdgePath& p, const EdgePath& q) {
    if (p.head(g) != q.start) throw GraphStructureError("concatenation of non-incident paths");
    EdgePath r = p;
    r.steps.insert(r.steps.end(), q.steps.begin(), q.steps.end());
    return r;
}

inline bool is_reduced(const EdgePath& p) {
    for (std::size_t i = 1; i < p.steps.size(); ++i)
        if (p.steps[i] == p.steps[i - 1].reverse()) return false;
    return true;
}

/// The unique reduced path homotopic rel endpoints to p, by iterated
/// cancellation of adjacent step/inverse-step pairs (stack pass, amortized
/// linear).  Uniqueness of the normal form is pinned by the exhaustive
/// cancellation-order tests rather than assumed.
inline EdgePath reduce(const EdgePath& p) {
    EdgePath out(p.start);
    for (const HalfEdge& h : p.steps) {
        if (!out.steps.empty() && out.steps.back() == h.reverse())
            out.steps.pop_back();
        else
            out.steps.push_back(h);
    }
    return out;
}

/// Closed edge path.  The constant loop is allowed (and counts as
/// cyclically reduced).
struct EdgeLoop {
    EdgePath path;

    EdgeLoop() = default;
    explicit EdgeLoop(EdgePath p) : path(std::move(p)) {}

    VertexId base() const { return path.start; }
    bool empty() const { return path.empty(); }
    std::size_t size() const { return path.size(); }
    const std::vector<HalfEdge>& steps() const { return path.steps; }

    friend bool operator==(const EdgeLoop& a, const EdgeLoop& b) { return a.path == b.path; }
    friend bool operator!=(const EdgeLoop& a, const EdgeLoop& b) { return !(a == b); }
};

inline void validate_loop(const MetricGraph& g, const EdgeLoop& l) {
    validate_path(g, l.path);
    if (l.path.head(g) != l.path.start) throw GraphStructureError("loop does not close up");
}

inline Rational loop_length(const MetricGraph& g, const EdgeLoop& l) {
    return path_length(g, l.path);
}

inline bool is_cyclically_reduced(const EdgeLoop& l) {
    if (!is_reduced(l.path)) return false;
    if (l.path.steps.size() >= 2 && l.path.steps.front() == l.path.steps.back().reverse())
        return false;
    return true;
}

/// Rotation of a loop starting at step index k (rebased accordingly).
inline EdgeLoop rotate_loop(const MetricGraph& g, const EdgeLoop& l, std::size_t k) {
    if (l.empty()) return l;
    k %= l.size();
    EdgeLoop out;
    out.path.start = g.tail(l.path.steps[k]);
    out.path.steps.reserve(l.size());
    for (std::size_t i = 0; i < l.size(); ++i)
        out.path.steps.push_back(l.path.steps[(k + i) % l.size()]);
    return out;
}

/// Lexicographically least rotation under (EdgeId, direction) step order.
inline EdgeLoop canonical_rotation(const MetricGraph& g, const EdgeLoop& l) {
    if (l.empty()) return l;
    std::size_t best = 0;
    const auto& s = l.path.steps;
    const std::size_t n = s.size();
    for (std::size_t k = 1; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const HalfEdge& x = s[(k + i) % n];
            const HalfEdge& y = s[(best + i) % n];
            if (x < y) {
                best = k;
                break;
            }
            if (y < x) break;
        }
    }
    return rotate_loop(g, l, best);
}

/// Result of cyclic reduction: the input loop is freely homotopic to
/// conjugator · loop · conjugator^(-1), with `loop` cyclically reduced and
/// rotated to its canonical representative.  `loop` is empty exactly when
/// the input is null-homotopic.
struct CyclicReduction {
    EdgeLoop loop;
    EdgePath conjugator;  // from the input basepoint to loop.base()
};

inline CyclicReduction cyclically_reduce(const MetricGraph& g, const EdgeLoop& l) {
    EdgePath reduced = reduce(l.path);
    std::size_t lo = 0, hi = reduced.steps.size();
    std::vector<HalfEdge> conj;
    while (hi - lo >= 2 && reduced.steps[lo] == reduced.steps[hi - 1].reverse()) {
        conj.push_back(reduced.steps[lo]);
        ++lo;
        --hi;
    }
    EdgeLoop core;
    core.path.start = conj.empty() ? reduced.start : g.head(conj.back());
    core.path.steps.assign(reduced.steps.begin() + static_cast<std::ptrdiff_t>(lo),
                           reduced.steps.begin() + static_cast<std::ptrdiff_t>(hi));

    // Fold the canonical rotation into the conjugator.
    EdgeLoop canon = canonical_rotation(g, core);
    if (!core.empty()) {
        std::size_t k = 0;
        while (k < core.size() && rotate_loop(g, core, k) != canon) ++k;
        for (std::size_t i = 0; i < k; ++i) conj.push_back(core.path.steps[i]);
    }
    CyclicReduction out;
    out.loop = canon;
    out.conjugator = reduce(EdgePath(l.path.start, std::move(conj)));
    return out;
}

/// Decomposition of the reduced concatenation of two reduced
/// paths: p1 = q1 · r, p2 = r^(-1) · q2, and reduced(p1 · p2) = q1 · q2.
struct ReducedConcatenation {
    EdgePath q;  // the reduced concatenation q1 · q2
    EdgePath r;  // the cancelled tail of p1 (possibly empty)
};

inline ReducedConcatenation concatenate_reduced(const MetricGraph& g, const EdgePath& p1,
                                                const EdgePath& p2) {
    if (!is_reduced(p1) || !is_reduced(p2))
        throw std::invalid_argument("concatenate_reduced requires reduced inputs");
    if (p1.head(g) != p2.start) throw GraphStructureError("paths are not incident");

    std::size_t k = 0;
    const std::size_t n1 = p1.steps.size(), n2 = p2.steps.size();
    while (k < n1 && k < n2 && p2.steps[k] == p1.steps[n1 - 1 - k].reverse()) ++k;

    ReducedConcatenation out;
    out.q.start = p1.start;
    out.q.steps.assign(p1.steps.begin(), p1.steps.end() - static_cast<std::ptrdiff_t>(k));
    out.q.steps.insert(out.q.steps.end(), p2.steps.begin() + static_cast<std::ptrdiff_t>(k),
                       p2.steps.end());
    out.r.start = k == n1 ? p1.start : g.head(p1.steps[n1 - 1 - k]);
    out.r.steps.assign(p1.steps.end() - static_cast<std::ptrdiff_t>(k), p1.steps.end());
    return out;
}

/// True when `inner` occurs as a contiguous block of `loop` read cyclically.
inline bool loop_contains_subpath(const EdgeLoop& loop, const std::vector<HalfEdge>& inner) {
    if (inner.empty()) return true;
    const std::size_t n = loop.size();
    if (inner.size() > n) return false;
    for (std::size_t k = 0; k < n; ++k) {
        bool ok = true;
        for (std::size_t i = 0; i < inner.size(); ++i) {
            if (loop.path.steps[(k + i) % n] != inner[i]) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace mlsg
