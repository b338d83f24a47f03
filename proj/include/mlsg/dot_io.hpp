#pragma once

#include <sstream>
#include <string>

#include "mlsg/core.hpp"
#include "mlsg/cover_tree.hpp"

namespace mlsg {

/// Graphviz export; branch points are drawn with a double circle.
inline std::string graph_to_dot(const MetricGraph& g, const std::vector<VertexId>& branchPoints = {}) {
    std::ostringstream os;
    os << "graph G {\n";
    std::vector<bool> isBranch(g.vertex_count(), false);
    for (VertexId v : branchPoints) isBranch.at(v) = true;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        os << "  v" << v;
        if (isBranch[v]) os << " [shape=doublecircle]";
        os << ";\n";
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        os << "  v" << g.edge(e).a << " -- v" << g.edge(e).b << " [label=\""
           << g.length(e).str() << "\"];\n";
    os << "}\n";
    return os.str();
}

inline std::string core_to_dot(const CoreGraph& c) {
    return graph_to_dot(c.graph(), c.branch_points());
}

inline std::string cover_ball_to_dot(const CoverBall& b) {
    std::ostringstream os;
    os << "graph T {\n";
    os << "  v0 [shape=doublecircle];\n";  // base lift
    for (const CoverBall::LiftedEdge& e : b.edges())
        os << "  v" << e.parent << " -- v" << e.child << " [label=\""
           << b.base_graph().length(e.step).str() << "\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace mlsg
