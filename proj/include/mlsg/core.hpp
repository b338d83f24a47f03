#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "mlsg/graph.hpp"
#include "mlsg/path.hpp"

namespace mlsg {

/// The closure of the union of all geodesic loops of a host graph, realized
/// as a metric graph of its own:
///   - degree-1 vertices are pruned iteratively (they lie on no loop),
///   - maximal chains of degree-2 vertices are suppressed into single edges
///     carrying the chain's total length,
///   - rank 0 gives the empty core, rank 1 a single circle vertex with a
///     self-loop, and for rank >= 2 every core vertex is a branch point.
///
/// The embedding back into the host is kept: each core vertex is a host
/// vertex and each core edge is an oriented host edge chain.
class CoreGraph {
public:
    CoreGraph() = default;
    CoreGraph(MetricGraph graph, std::vector<VertexId> vertexToHost,
              std::vector<EdgePath> edgeToHostPath, std::vector<VertexId> branchPoints)
        : graph_(std::move(graph)),
          vertexToHost_(std::move(vertexToHost)),
          edgeToHostPath_(std::move(edgeToHostPath)),
          branchPoints_(std::move(branchPoints)) {}

    const MetricGraph& graph() const { return graph_; }
    bool empty() const { return graph_.empty(); }
    int rank() const { return graph_.rank(); }

    VertexId host_vertex(VertexId coreVertex) const { return vertexToHost_.at(coreVertex); }
    /// Host path realizing core edge e, oriented from endpoint a to b.
    const EdgePath& host_path(EdgeId coreEdge) const { return edgeToHostPath_.at(coreEdge); }
    const std::vector<VertexId>& branch_points() const { return branchPoints_; }

    bool is_branch_point(VertexId coreVertex) const {
        return graph_.degree(coreVertex) >= 3;
    }

    /// Set of host edges covered by the core's embedded image.
    std::vector<bool> host_edge_mask(const MetricGraph& host) const {
        std::vector<bool> mask(host.edge_count(), false);
        for (const EdgePath& p : edgeToHostPath_)
            for (const HalfEdge& h : p.steps) mask[h.edge] = true;
        return mask;
    }

    /// Maps a point on a core edge to the corresponding host point.
    GraphPoint host_point(const MetricGraph& host, EdgeId coreEdge, const Rational& offset) const {
        const EdgePath& p = edgeToHostPath_.at(coreEdge);
        Rational remaining = offset;
        for (const HalfEdge& h : p.steps) {
            const Rational& len = host.length(h);
            if (remaining <= len) return GraphPoint::on_edge(host, h, remaining);
            remaining -= len;
        }
        throw GraphStructureError("offset exceeds core edge length");
    }

private:
    MetricGraph graph_;
    std::vector<VertexId> vertexToHost_;
    std::vector<EdgePath> edgeToHostPath_;
    std::vector<VertexId> branchPoints_;
};

inline CoreGraph compute_core(const MetricGraph& g) {
    const std::size_t V = g.vertex_count(), E = g.edge_count();

    // Iterated leaf pruning on the host.
    std::vector<bool> vAlive(V, true), eAlive(E, true);
    std::vector<std::size_t> degree(V, 0);
    for (EdgeId e = 0; e < E; ++e) {
        ++degree[g.edge(e).a];
        ++degree[g.edge(e).b];
    }
    std::vector<VertexId> queue;
    for (VertexId v = 0; v < V; ++v)
        if (degree[v] <= 1) queue.push_back(v);
    while (!queue.empty()) {
        VertexId v = queue.back();
        queue.pop_back();
        if (!vAlive[v] || degree[v] > 1) continue;
        vAlive[v] = false;
        for (const HalfEdge& h : g.germs(v)) {
            if (!eAlive[h.edge]) continue;
            eAlive[h.edge] = false;
            --degree[v];
            VertexId w = g.head(h);
            --degree[w];
            if (vAlive[w] && degree[w] <= 1) queue.push_back(w);
        }
    }

    bool anyAlive = false;
    for (VertexId v = 0; v < V; ++v) anyAlive = anyAlive || vAlive[v];
    if (!anyAlive) return CoreGraph();  // rank 0: no geodesic loops at all

    // Step from v along h through the pruned graph, swallowing degree-2
    // vertices, until the next kept vertex.
    auto nextAliveGerm = [&](VertexId v, const HalfEdge& incoming) -> HalfEdge {
        for (const HalfEdge& h : g.germs(v)) {
            if (!eAlive[h.edge]) continue;
            if (h == incoming.reverse()) continue;
            return h;
        }
        throw GraphStructureError("internal: dangling chain in core computation");
    };

    std::vector<VertexId> keptVertices;
    for (VertexId v = 0; v < V; ++v)
        if (vAlive[v] && degree[v] >= 3) keptVertices.push_back(v);

    if (keptVertices.empty()) {
        // Remaining graph is a single circle of degree-2 vertices.
        VertexId anchor = kNoVertex;
        for (VertexId v = 0; v < V; ++v)
            if (vAlive[v]) {
                anchor = v;
                break;
            }
        HalfEdge first;
        for (const HalfEdge& h : g.germs(anchor))
            if (eAlive[h.edge]) {
                first = h;
                break;
            }
        EdgePath hostPath(anchor);
        hostPath.steps.push_back(first);
        VertexId at = g.head(first);
        HalfEdge last = first;
        while (at != anchor) {
            last = nextAliveGerm(at, last);
            hostPath.steps.push_back(last);
            at = g.head(last);
        }
        MetricGraph circle(1, {{0, 0, path_length(g, hostPath)}});
        return CoreGraph(std::move(circle), {anchor}, {hostPath}, {});
    }

    std::vector<VertexId> hostToCore(V, kNoVertex);
    for (std::size_t i = 0; i < keptVertices.size(); ++i)
        hostToCore[keptVertices[i]] = static_cast<VertexId>(i);

    std::vector<EdgeRecord> coreEdges;
    std::vector<EdgePath> coreEdgePaths;
    std::set<HalfEdge> germDone;  // chain start germs already walked
    for (VertexId v : keptVertices) {
        for (const HalfEdge& h : g.germs(v)) {
            if (!eAlive[h.edge] || germDone.count(h)) continue;
            EdgePath hostPath(v);
            hostPath.steps.push_back(h);
            VertexId at = g.head(h);
            HalfEdge last = h;
            while (hostToCore[at] == kNoVertex) {
                last = nextAliveGerm(at, last);
                hostPath.steps.push_back(last);
                at = g.head(last);
            }
            germDone.insert(h);
            germDone.insert(last.reverse());
            coreEdges.push_back({hostToCore[v], hostToCore[at], path_length(g, hostPath)});
            coreEdgePaths.push_back(hostPath);
        }
    }

    MetricGraph coreGraph(keptVertices.size(), coreEdges);
    std::vector<VertexId> branch;
    for (VertexId cv = 0; cv < coreGraph.vertex_count(); ++cv)
        if (coreGraph.degree(cv) >= 3) branch.push_back(cv);
    return CoreGraph(std::move(coreGraph), std::move(keptVertices), std::move(coreEdgePaths),
                     std::move(branch));
}

/// Def-style branch test: three locally distinct geodesic germs exist at a
/// core vertex exactly when its core degree is at least 3.
inline bool is_branch_point(const CoreGraph& c, VertexId coreVertex) {
    if (coreVertex >= c.graph().vertex_count())
        throw GraphStructureError("vertex not in core");
    return c.is_branch_point(coreVertex);
}

}  // namespace mlsg
