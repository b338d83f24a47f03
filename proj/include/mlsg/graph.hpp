#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "mlsg/rational.hpp"

namespace mlsg {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();

/// Thrown when an argument refers to vertices/edges/points that do not
/// belong to the graph it is used with.
struct GraphStructureError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Signals that an operation has no content for the given instance (for
/// example, branch-point machinery on a rank-1 circle).
struct NotApplicableError : std::logic_error {
    using std::logic_error::logic_error;
};

enum class Direction : std::uint8_t { Forward = 0, Backward = 1 };

inline Direction opposite(Direction d) {
    return d == Direction::Forward ? Direction::Backward : Direction::Forward;
}

/// One of the two oriented traversals of an edge.
struct HalfEdge {
    EdgeId edge = kNoEdge;
    Direction dir = Direction::Forward;

    HalfEdge() = default;
    HalfEdge(EdgeId e, Direction d) : edge(e), dir(d) {}

    HalfEdge reverse() const { return HalfEdge(edge, opposite(dir)); }

    friend bool operator==(const HalfEdge& a, const HalfEdge& b) {
        return a.edge == b.edge && a.dir == b.dir;
    }
    friend bool operator!=(const HalfEdge& a, const HalfEdge& b) { return !(a == b); }
    friend bool operator<(const HalfEdge& a, const HalfEdge& b) {
        if (a.edge != b.edge) return a.edge < b.edge;
        return static_cast<int>(a.dir) < static_cast<int>(b.dir);
    }
};

struct EdgeRecord {
    VertexId a = kNoVertex;  // tail of the Forward half-edge
    VertexId b = kNoVertex;  // head of the Forward half-edge
    Rational length;
};

/// Finite connected metric multigraph.  Parallel edges and self-loops are
/// allowed, every edge length is a positive rational, and instances are
/// immutable once built.
class MetricGraph {
public:
    MetricGraph() = default;

    MetricGraph(std::size_t vertexCount, std::vector<EdgeRecord> edges)
        : vertexCount_(vertexCount), edges_(std::move(edges)) {
        for (const EdgeRecord& e : edges_) {
            if (e.a >= vertexCount_ || e.b >= vertexCount_)
                throw GraphStructureError("edge endpoint out of range");
            if (!e.length.is_positive())
                throw GraphStructureError("edge length must be positive");
        }
        buildAdjacency();
        if (!isConnected()) throw GraphStructureError("graph must be connected");
    }

    std::size_t vertex_count() const { return vertexCount_; }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return vertexCount_ == 0; }

    const EdgeRecord& edge(EdgeId e) const { return edges_.at(e); }
    const std::vector<EdgeRecord>& edges() const { return edges_; }
    const Rational& length(EdgeId e) const { return edges_.at(e).length; }
    const Rational& length(const HalfEdge& h) const { return edges_.at(h.edge).length; }

    VertexId tail(const HalfEdge& h) const {
        const EdgeRecord& e = edges_.at(h.edge);
        return h.dir == Direction::Forward ? e.a : e.b;
    }
    VertexId head(const HalfEdge& h) const {
        const EdgeRecord& e = edges_.at(h.edge);
        return h.dir == Direction::Forward ? e.b : e.a;
    }

    /// Outgoing half-edges at v, sorted by (edge, direction).  A self-loop
    /// contributes both of its orientations, so degree(v) counts it twice.
    const std::vector<HalfEdge>& germs(VertexId v) const { return adjacency_.at(v); }
    std::size_t degree(VertexId v) const { return adjacency_.at(v).size(); }

    /// First Betti number E - V + 1 of a connected graph (0 for the empty graph).
    int rank() const {
        if (vertexCount_ == 0) return 0;
        return static_cast<int>(edges_.size()) - static_cast<int>(vertexCount_) + 1;
    }

    /// Exact single-source shortest-path distances over vertices.
    std::vector<Rational> distances_from(VertexId source) const {
        if (source >= vertexCount_) throw GraphStructureError("source vertex out of range");
        std::vector<Rational> dist(vertexCount_);
        std::vector<bool> done(vertexCount_, false), seen(vertexCount_, false);
        seen[source] = true;
        using Item = std::pair<Rational, VertexId>;
        auto cmp = [](const Item& x, const Item& y) { return y.first < x.first; };
        std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
        pq.push({Rational(0), source});
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (done[v]) continue;
            done[v] = true;
            dist[v] = d;
            for (const HalfEdge& h : adjacency_[v]) {
                VertexId w = head(h);
                if (done[w]) continue;
                Rational nd = d + length(h);
                if (!seen[w] || nd < dist[w]) {
                    seen[w] = true;
                    dist[w] = nd;
                    pq.push({nd, w});
                }
            }
        }
        return dist;
    }

    Rational vertex_distance(VertexId a, VertexId b) const { return distances_from(a).at(b); }

private:
    void buildAdjacency() {
        adjacency_.assign(vertexCount_, {});
        for (EdgeId e = 0; e < edges_.size(); ++e) {
            adjacency_[edges_[e].a].push_back(HalfEdge(e, Direction::Forward));
            adjacency_[edges_[e].b].push_back(HalfEdge(e, Direction::Backward));
        }
        for (auto& list : adjacency_) std::sort(list.begin(), list.end());
    }

    bool isConnected() const {
        if (vertexCount_ == 0) return true;
        std::vector<bool> visited(vertexCount_, false);
        std::vector<VertexId> stack = {0};
        visited[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            VertexId v = stack.back();
            stack.pop_back();
            for (const HalfEdge& h : adjacency_[v]) {
                VertexId w = head(h);
                if (!visited[w]) {
                    visited[w] = true;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == vertexCount_;
    }

    std::size_t vertexCount_ = 0;
    std::vector<EdgeRecord> edges_;
    std::vector<std::vector<HalfEdge>> adjacency_;
};

/// A point of the underlying geodesic space: a vertex, or an interior point
/// of an edge.  Interior points are kept in canonical form, measured from
/// endpoint `a` of the edge (the Forward parametrization) with
/// 0 < offset < length; offsets that reach an endpoint collapse to the
/// vertex representation.
class GraphPoint {
public:
    static GraphPoint at_vertex(VertexId v) {
        GraphPoint p;
        p.vertex_ = v;
        return p;
    }

    /// Point at `offset` along half-edge h from its tail.
    static GraphPoint on_edge(const MetricGraph& g, HalfEdge h, const Rational& offset) {
        const Rational& len = g.length(h);
        if (offset.is_negative() || offset > len)
            throw GraphStructureError("point offset outside edge");
        if (offset.is_zero()) return at_vertex(g.tail(h));
        if (offset == len) return at_vertex(g.head(h));
        GraphPoint p;
        p.edge_ = h.edge;
        p.offset_ = h.dir == Direction::Forward ? offset : len - offset;
        return p;
    }

    bool is_vertex() const { return vertex_ != kNoVertex; }
    VertexId vertex() const { return vertex_; }
    EdgeId edge() const { return edge_; }
    /// Offset from endpoint `a` of edge(); only meaningful for interior points.
    const Rational& offset() const { return offset_; }

    friend bool operator==(const GraphPoint& p, const GraphPoint& q) {
        return p.vertex_ == q.vertex_ && p.edge_ == q.edge_ && p.offset_ == q.offset_;
    }
    friend bool operator!=(const GraphPoint& p, const GraphPoint& q) { return !(p == q); }

private:
    VertexId vertex_ = kNoVertex;
    EdgeId edge_ = kNoEdge;
    Rational offset_;
};

namespace detail {
inline void checkPoint(const MetricGraph& g, const GraphPoint& p) {
    if (p.is_vertex()) {
        if (p.vertex() >= g.vertex_count()) throw GraphStructureError("point vertex not in graph");
    } else {
        if (p.edge() >= g.edge_count()) throw GraphStructureError("point edge not in graph");
        if (!p.offset().is_positive() || p.offset() >= g.length(p.edge()))
            throw GraphStructureError("point offset not interior");
    }
}
}  // namespace detail

/// Length of a distance minimizer between two points, in the path metric.
inline Rational distance(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q) {
    detail::checkPoint(g, p);
    detail::checkPoint(g, q);
    if (p == q) return Rational(0);

    if (p.is_vertex() && q.is_vertex()) return g.vertex_distance(p.vertex(), q.vertex());

    // Distances from each point to every vertex, by splitting at endpoints.
    auto toVertices = [&](const GraphPoint& x) {
        std::vector<Rational> d;
        if (x.is_vertex()) {
            d = g.distances_from(x.vertex());
        } else {
            const EdgeRecord& e = g.edge(x.edge());
            std::vector<Rational> da = g.distances_from(e.a);
            std::vector<Rational> db = g.distances_from(e.b);
            const Rational fromA = x.offset();
            const Rational fromB = g.length(x.edge()) - x.offset();
            d.resize(g.vertex_count());
            for (VertexId v = 0; v < g.vertex_count(); ++v)
                d[v] = std::min(fromA + da[v], fromB + db[v]);
        }
        return d;
    };

    std::vector<Rational> dp = toVertices(p);
    std::vector<Rational> dq = toVertices(q);
    Rational best;
    bool haveBest = false;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        Rational via = dp[v] + dq[v];
        if (!haveBest || via < best) {
            best = via;
            haveBest = true;
        }
    }

    // Same-edge direct segment, which avoids all vertices.
    if (!p.is_vertex() && !q.is_vertex() && p.edge() == q.edge())
        best = std::min(best, (p.offset() - q.offset()).abs());

    return best;
}

}  // namespace mlsg
