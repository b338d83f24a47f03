#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mlsg/core.hpp"
#include "mlsg/marking.hpp"
#include "mlsg/oracle.hpp"
#include "mlsg/rng.hpp"
#include "mlsg/word.hpp"

namespace mlsg {

struct GenBounds {
    int vertices = 0;      // 0 = derive from rank
    int rank = 2;          // extra edges beyond the spanning tree
    std::int64_t maxNumerator = 20;
    std::int64_t maxDenominator = 20;
};

inline Rational random_length(Rng& rng, const GenBounds& b) {
    std::int64_t num = rng.between(1, b.maxNumerator);
    std::int64_t den = rng.between(1, b.maxDenominator);
    return Rational(num, den);
}

/// Random connected metric graph: a uniform labeled spanning tree plus
/// `rank` uniformly chosen extra edges (self-loops and parallel edges
/// included on purpose), with uniform bounded rational lengths.
inline MetricGraph random_graph(Rng& rng, const GenBounds& bounds) {
    if (bounds.rank < 0) throw std::invalid_argument("rank must be >= 0");
    int V = bounds.vertices;
    if (V <= 0) V = static_cast<int>(rng.between(bounds.rank == 0 ? 2 : 1, bounds.rank + 5));
    std::vector<EdgeRecord> edges;

    // Uniform labeled tree via a Pruefer sequence.
    if (V >= 2) {
        std::vector<int> pruefer(static_cast<std::size_t>(V) - 2);
        for (auto& p : pruefer) p = static_cast<int>(rng.below(static_cast<std::uint64_t>(V)));
        std::vector<int> degree(V, 1);
        for (int p : pruefer) ++degree[p];
        std::vector<bool> used(V, false);
        for (int p : pruefer) {
            int leaf = -1;
            for (int v = 0; v < V; ++v)
                if (degree[v] == 1 && !used[v]) {
                    leaf = v;
                    break;
                }
            used[leaf] = true;
            edges.push_back({static_cast<VertexId>(leaf), static_cast<VertexId>(p),
                             random_length(rng, bounds)});
            --degree[p];
        }
        int a = -1, b = -1;
        for (int v = 0; v < V; ++v)
            if (degree[v] == 1 && !used[v]) (a < 0 ? a : b) = v;
        edges.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b),
                         random_length(rng, bounds)});
    }

    for (int k = 0; k < bounds.rank; ++k) {
        VertexId a = static_cast<VertexId>(rng.below(static_cast<std::uint64_t>(V)));
        VertexId b = static_cast<VertexId>(rng.below(static_cast<std::uint64_t>(V)));
        edges.push_back({a, b, random_length(rng, bounds)});
    }
    return MetricGraph(static_cast<std::size_t>(V), edges);
}

/// A relabeled isomorphic copy of a graph together with the half-edge map
/// realizing the isomorphism.
struct RelabeledGraph {
    MetricGraph graph;
    std::vector<VertexId> vertexImage;  // source vertex -> image vertex
    std::vector<EdgeId> edgeImage;      // source edge -> image edge
    std::vector<bool> flipped;          // source edge stored with swapped endpoints

    HalfEdge map(const HalfEdge& h) const {
        Direction d = h.dir;
        if (flipped[h.edge]) d = opposite(d);
        return HalfEdge(edgeImage[h.edge], d);
    }

    EdgePath map_path(const EdgePath& p) const {
        EdgePath out(vertexImage.at(p.start));
        out.steps.reserve(p.steps.size());
        for (const HalfEdge& h : p.steps) out.steps.push_back(map(h));
        return out;
    }
};

inline RelabeledGraph relabel_graph(Rng& rng, const MetricGraph& g) {
    const std::size_t V = g.vertex_count(), E = g.edge_count();
    RelabeledGraph out;
    out.vertexImage.resize(V);
    out.edgeImage.resize(E);
    out.flipped.resize(E);

    std::vector<VertexId> vperm(V);
    for (std::size_t i = 0; i < V; ++i) vperm[i] = static_cast<VertexId>(i);
    for (std::size_t i = V; i > 1; --i)
        std::swap(vperm[i - 1], vperm[rng.below(i)]);
    std::vector<EdgeId> eperm(E);
    for (std::size_t i = 0; i < E; ++i) eperm[i] = static_cast<EdgeId>(i);
    for (std::size_t i = E; i > 1; --i)
        std::swap(eperm[i - 1], eperm[rng.below(i)]);

    std::vector<EdgeRecord> edges(E);
    for (EdgeId e = 0; e < E; ++e) {
        bool flip = rng.coin();
        out.edgeImage[e] = eperm[e];
        out.flipped[e] = flip;
        VertexId a = vperm[g.edge(e).a], b = vperm[g.edge(e).b];
        if (flip) std::swap(a, b);
        edges[eperm[e]] = {a, b, g.length(e)};
    }
    for (std::size_t v = 0; v < V; ++v) out.vertexImage[v] = vperm[v];
    out.graph = MetricGraph(V, edges);
    return out;
}

/// A full hidden instance for round-trip experiments: the hidden space is a
/// relabeled copy of the source core (optionally with one perturbed edge
/// length), marked on its own terms, and phi carries source generators to
/// hidden words.  An inner twist by a random hidden word is composed in;
/// it changes no queried value but exercises conjugation invariance.
struct HiddenInstance {
    CoreGraph core;
    Marking marking;
    GroupWordSubstitution phi;
    std::optional<EdgeId> perturbedEdge;  // hidden core edge, when perturbing
    Rational perturbation;
};

inline HiddenInstance make_hidden_instance(Rng& rng, const CoreGraph& sourceCore,
                                           const Marking& sourceMarking, bool perturb) {
    const MetricGraph& src = sourceCore.graph();
    RelabeledGraph rel = relabel_graph(rng, src);

    std::optional<EdgeId> perturbedEdge;
    Rational delta;
    MetricGraph hiddenGraph = rel.graph;
    if (perturb && hiddenGraph.edge_count() > 0) {
        EdgeId target = static_cast<EdgeId>(rng.below(hiddenGraph.edge_count()));
        delta = Rational(rng.coin() ? 1 : -1, 7);
        if (!(hiddenGraph.length(target) + delta).is_positive()) delta = Rational(1, 7);
        std::vector<EdgeRecord> edges = hiddenGraph.edges();
        edges[target].length += delta;
        hiddenGraph = MetricGraph(hiddenGraph.vertex_count(), edges);
        perturbedEdge = target;
    }

    HiddenInstance out;
    out.core = compute_core(hiddenGraph);
    std::optional<Marking> hm = build_marking(out.core);
    if (!hm) throw std::logic_error("hidden instance lost its fundamental group");
    out.marking = *hm;
    out.perturbedEdge = perturbedEdge;
    out.perturbation = delta;

    // compute_core renumbers vertices and edges, so build the translation
    // from relabeled-host steps to hidden-core steps.  Every hidden core
    // edge embeds as a single host step here (the source was already a
    // suppressed core).
    const MetricGraph& hg = out.core.graph();
    std::vector<VertexId> hostToCoreVertex(hiddenGraph.vertex_count(), kNoVertex);
    for (VertexId cv = 0; cv < hg.vertex_count(); ++cv)
        hostToCoreVertex[out.core.host_vertex(cv)] = cv;
    std::vector<HalfEdge> hostToCoreStep(2 * hiddenGraph.edge_count());
    for (EdgeId ce = 0; ce < hg.edge_count(); ++ce) {
        const EdgePath& hp = out.core.host_path(ce);
        if (hp.steps.size() != 1)
            throw std::logic_error("hidden core unexpectedly suppressed a chain");
        const HalfEdge h = hp.steps[0];
        hostToCoreStep[2 * h.edge + static_cast<std::size_t>(h.dir)] =
            HalfEdge(ce, Direction::Forward);
        hostToCoreStep[2 * h.edge + static_cast<std::size_t>(opposite(h.dir))] =
            HalfEdge(ce, Direction::Backward);
    }
    auto toCorePath = [&](const EdgePath& host) {
        EdgePath p(hostToCoreVertex.at(host.start));
        for (const HalfEdge& h : host.steps)
            p.steps.push_back(hostToCoreStep[2 * h.edge + static_cast<std::size_t>(h.dir)]);
        return p;
    };

    // The relabeling isometry induces the isomorphism: each source generator
    // loop maps pointwise to a hidden loop, which is rebased to the hidden
    // basepoint and read off as a word.  An inner twist is composed on top.
    GroupWord twist;
    if (out.marking.rank() > 0) {
        int twistLen = static_cast<int>(rng.below(4));
        for (int i = 0; i < twistLen; ++i) {
            GroupLetter l{static_cast<std::uint32_t>(rng.below(out.marking.rank())), rng.coin()};
            if (!twist.empty() && twist.back() == l.inverted()) continue;
            twist.push_back(l);
        }
    }
    for (const EdgeLoop& genLoop : sourceMarking.generatorLoops) {
        EdgePath image = toCorePath(rel.map_path(genLoop.path));
        EdgePath conj = tree_path_from_base(hg, out.marking, image.start);
        EdgePath based = concat(hg, conj, image);
        based = concat(hg, based, reverse_path(hg, conj));
        GroupWord w = loop_to_word(hg, out.marking, EdgeLoop(reduce(based)));
        out.phi.images.push_back(conjugate_word(w, twist));
    }
    return out;
}

}  // namespace mlsg
