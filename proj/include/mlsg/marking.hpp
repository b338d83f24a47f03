#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "mlsg/core.hpp"
#include "mlsg/loop_ops.hpp"
#include "mlsg/path.hpp"
#include "mlsg/word.hpp"

namespace mlsg {

/// Identification of the fundamental group of a core graph with a free
/// group: a basepoint, a shortest-path spanning tree, and one generator per
/// non-tree edge, realized as the reduced based loop
/// (tree path to the edge) · edge · (tree path back).
struct Marking {
    VertexId basepoint = kNoVertex;
    std::vector<bool> inTree;          // by core EdgeId
    std::vector<EdgeId> generators;    // non-tree edges, ascending
    std::vector<EdgeLoop> generatorLoops;
    std::vector<EdgeId> parentEdge;    // tree edge toward basepoint, by vertex
    std::vector<VertexId> parentVertex;

    std::size_t rank() const { return generators.size(); }
};

/// Deterministic marking: basepoint is the least core vertex, the spanning
/// tree is the shortest-path tree from it (least-EdgeId tie-breaking), and
/// generators are ordered by EdgeId.  Returns nothing for the empty core.
inline std::optional<Marking> build_marking(const CoreGraph& c) {
    const MetricGraph& g = c.graph();
    if (g.empty()) return std::nullopt;

    Marking m;
    m.basepoint = 0;
    std::vector<Rational> dist = g.distances_from(m.basepoint);
    m.parentEdge.assign(g.vertex_count(), kNoEdge);
    m.parentVertex.assign(g.vertex_count(), kNoVertex);
    m.inTree.assign(g.edge_count(), false);
    for (VertexId v = 1; v < g.vertex_count(); ++v) {
        for (const HalfEdge& h : g.germs(v)) {
            VertexId u = g.head(h);  // neighbor; germ h points v -> u
            if (u == v) continue;
            if (dist[u] + g.length(h) == dist[v]) {
                if (m.parentEdge[v] == kNoEdge || h.edge < m.parentEdge[v]) {
                    m.parentEdge[v] = h.edge;
                    m.parentVertex[v] = u;
                }
            }
        }
        if (m.parentEdge[v] == kNoEdge)
            throw std::logic_error("build_marking: disconnected core");
        m.inTree[m.parentEdge[v]] = true;
    }

    auto treePathToBase = [&](VertexId v) {
        EdgePath p(v);
        while (v != m.basepoint) {
            EdgeId e = m.parentEdge[v];
            const EdgeRecord& rec = g.edge(e);
            p.steps.push_back(HalfEdge(e, rec.a == v ? Direction::Forward : Direction::Backward));
            v = m.parentVertex[v];
        }
        return p;
    };

    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (m.inTree[e]) continue;
        m.generators.push_back(e);
        const EdgeRecord& rec = g.edge(e);
        EdgePath toTail = reverse_path(g, treePathToBase(rec.a));
        EdgePath loop = concat(g, toTail, EdgePath(rec.a, {HalfEdge(e, Direction::Forward)}));
        loop = concat(g, loop, treePathToBase(rec.b));
        m.generatorLoops.push_back(EdgeLoop(reduce(loop)));
    }
    return m;
}

/// Reduced tree path from a core vertex down to the marking basepoint.
inline EdgePath tree_path_to_base(const MetricGraph& g, const Marking& m, VertexId v) {
    EdgePath p(v);
    while (v != m.basepoint) {
        EdgeId e = m.parentEdge.at(v);
        const EdgeRecord& rec = g.edge(e);
        p.steps.push_back(HalfEdge(e, rec.a == v ? Direction::Forward : Direction::Backward));
        v = m.parentVertex[v];
    }
    return p;
}

inline EdgePath tree_path_from_base(const MetricGraph& g, const Marking& m, VertexId v) {
    return reverse_path(g, tree_path_to_base(g, m, v));
}

/// Realizes a group word as the reduced based loop at the marking's
/// basepoint; the map is a homomorphism up to based homotopy.
inline EdgeLoop word_to_loop(const MetricGraph& g, const Marking& m, const GroupWord& w) {
    EdgePath p(m.basepoint);
    for (const GroupLetter& l : w) {
        if (l.gen >= m.rank()) throw std::out_of_range("generator index exceeds rank");
        const EdgePath& gen = m.generatorLoops[l.gen].path;
        EdgePath part = l.inverse ? reverse_path(g, gen) : gen;
        p.steps.insert(p.steps.end(), part.steps.begin(), part.steps.end());
    }
    return EdgeLoop(reduce(p));
}

/// Expresses a based loop at the marking's basepoint as a group word: every
/// traversal of a non-tree edge contributes the corresponding generator.
inline GroupWord loop_to_word(const MetricGraph&, const Marking& m, const EdgeLoop& loop) {
    if (loop.base() != m.basepoint)
        throw GraphStructureError("loop_to_word requires a loop at the marking basepoint");
    GroupWord w;
    for (const HalfEdge& h : loop.steps()) {
        if (m.inTree[h.edge]) continue;
        std::uint32_t idx = 0;
        while (idx < m.generators.size() && m.generators[idx] != h.edge) ++idx;
        w.push_back({idx, h.dir == Direction::Backward});
    }
    return free_reduce(w);
}

/// Marked length spectrum value of a word: the total edge length of the
/// cyclically reduced loop in its free homotopy class.  Zero exactly for
/// the identity.  (On finite graphs every class is rectifiable, so the
/// infinite value of the general definition never occurs here.)
inline Rational mls(const MetricGraph& g, const Marking& m, const GroupWord& w) {
    EdgeLoop based = word_to_loop(g, m, w);
    CyclicReduction cr = cyclically_reduce(g, based);
    return loop_length(g, cr.loop);
}

}  // namespace mlsg
