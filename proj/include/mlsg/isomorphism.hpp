#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "mlsg/graph.hpp"

namespace mlsg {

namespace detail {

/// Multiset of edge lengths between an ordered vertex pair (self-loops keyed
/// by (v, v)).
inline std::map<std::pair<VertexId, VertexId>, std::vector<Rational>> pairLengths(
    const MetricGraph& g) {
    std::map<std::pair<VertexId, VertexId>, std::vector<Rational>> out;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        VertexId a = g.edge(e).a, b = g.edge(e).b;
        if (b < a) std::swap(a, b);
        out[{a, b}].push_back(g.length(e));
    }
    for (auto& [k, v] : out) std::sort(v.begin(), v.end());
    return out;
}

/// Per-vertex invariant used for pruning: (degree, sorted incident lengths).
inline std::vector<std::pair<std::size_t, std::vector<Rational>>> vertexSignatures(
    const MetricGraph& g) {
    std::vector<std::pair<std::size_t, std::vector<Rational>>> sig(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        sig[v].first = g.degree(v);
        for (const HalfEdge& h : g.germs(v)) sig[v].second.push_back(g.length(h));
        std::sort(sig[v].second.begin(), sig[v].second.end());
    }
    return sig;
}

}  // namespace detail

/// Exhaustive backtracking test for a length-preserving isomorphism of
/// multigraphs (exact rational equality).  Degree and incident-length
/// multisets prune the search; sizes here are desk scale.
inline bool weighted_isomorphic(const MetricGraph& g1, const MetricGraph& g2) {
    if (g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count())
        return false;
    if (g1.vertex_count() == 0) return true;

    auto sig1 = detail::vertexSignatures(g1);
    auto sig2 = detail::vertexSignatures(g2);
    {
        auto s1 = sig1, s2 = sig2;
        std::sort(s1.begin(), s1.end());
        std::sort(s2.begin(), s2.end());
        if (s1 != s2) return false;
    }

    auto pl1 = detail::pairLengths(g1);
    auto pl2 = detail::pairLengths(g2);

    const std::size_t n = g1.vertex_count();
    std::vector<VertexId> map(n, kNoVertex);
    std::vector<bool> used(n, false);

    // Match vertices in order of decreasing constraint (rarest signature first).
    std::vector<VertexId> order(n);
    for (VertexId v = 0; v < n; ++v) order[v] = v;
    std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
        return sig1[a].first > sig1[b].first;
    });

    auto consistent = [&](VertexId v, VertexId w) {
        if (sig1[v] != sig2[w]) return false;
        // All already-mapped neighbors must carry identical length multisets.
        for (VertexId u = 0; u < n; ++u) {
            if (map[u] == kNoVertex) continue;
            auto key1 = std::make_pair(std::min(u, v), std::max(u, v));
            auto key2 = std::make_pair(std::min(map[u], w), std::max(map[u], w));
            auto it1 = pl1.find(key1);
            auto it2 = pl2.find(key2);
            bool has1 = it1 != pl1.end(), has2 = it2 != pl2.end();
            if (has1 != has2) return false;
            if (has1 && it1->second != it2->second) return false;
        }
        auto self1 = pl1.find({v, v});
        auto self2 = pl2.find({w, w});
        bool hs1 = self1 != pl1.end(), hs2 = self2 != pl2.end();
        if (hs1 != hs2) return false;
        if (hs1 && self1->second != self2->second) return false;
        return true;
    };

    std::vector<std::size_t> choice(n, 0);
    std::size_t depth = 0;
    while (true) {
        if (depth == n) return true;
        VertexId v = order[depth];
        bool advanced = false;
        for (std::size_t w = choice[depth]; w < n; ++w) {
            if (used[w]) continue;
            if (!consistent(v, static_cast<VertexId>(w))) continue;
            map[v] = static_cast<VertexId>(w);
            used[w] = true;
            choice[depth] = w + 1;
            ++depth;
            if (depth < n) choice[depth] = 0;
            advanced = true;
            break;
        }
        if (advanced) continue;
        if (depth == 0) return false;
        --depth;
        VertexId prev = order[depth];
        used[map[prev]] = false;
        map[prev] = kNoVertex;
    }
}

}  // namespace mlsg
