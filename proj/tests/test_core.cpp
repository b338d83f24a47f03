#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "mlsg/core.hpp"
#include "mlsg/generate.hpp"
#include "mlsg/isomorphism.hpp"
#include "mlsg/loop_ops.hpp"
#include "test_support.hpp"

using namespace mlsg;
using namespace testsupport;

namespace {

// Brute-force realization of the hull: union of the images of all
// cyclically reduced loops of at most `maxSteps` steps, as a host edge set.
std::set<EdgeId> loop_union_edges(const MetricGraph& g, std::size_t maxSteps) {
    std::set<EdgeId> covered;
    std::vector<HalfEdge> walk;
    auto dfs = [&](auto&& self) -> void {
        if (!walk.empty()) {
            bool closes = g.tail(walk.front()) == g.head(walk.back());
            bool cyclic = closes && (walk.size() < 2 || walk.front() != walk.back().reverse());
            if (closes && cyclic)
                for (const HalfEdge& h : walk) covered.insert(h.edge);
        }
        if (walk.size() >= maxSteps) return;
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            for (Direction d : {Direction::Forward, Direction::Backward}) {
                HalfEdge h(e, d);
                if (!walk.empty() && g.tail(h) != g.head(walk.back())) continue;
                if (!walk.empty() && h == walk.back().reverse()) continue;
                walk.push_back(h);
                self(self);
                walk.pop_back();
            }
        }
    };
    dfs(dfs);
    return covered;
}

MetricGraph theta_with_pendant() {
    // theta on {0,1} plus a pendant edge 0-2 of length 7
    return MetricGraph(3, {{0, 1, Rational(1)},
                           {0, 1, Rational(2)},
                           {0, 1, Rational(3)},
                           {0, 2, Rational(7)}});
}

}  // namespace

TEST_CASE("trees have empty cores") {
    MetricGraph path(3, {{0, 1, Rational(1)}, {1, 2, Rational(2)}});
    CoreGraph c = compute_core(path);
    CHECK(c.empty());
    CHECK(c.rank() == 0);

    MetricGraph single(1, {});
    CHECK(compute_core(single).empty());
}

TEST_CASE("a single self-loop is its own core with no branch points") {
    MetricGraph g(1, {{0, 0, Rational(4)}});
    CoreGraph c = compute_core(g);
    CHECK(c.rank() == 1);
    CHECK(c.graph().vertex_count() == 1);
    CHECK(c.graph().edge_count() == 1);
    CHECK(c.graph().length(0) == Rational(4));
    CHECK(c.branch_points().empty());
}

TEST_CASE("a subdivided circle suppresses to one cycle") {
    MetricGraph g(3, {{0, 1, Rational(1)}, {1, 2, Rational(2)}, {2, 0, Rational(3)}});
    CoreGraph c = compute_core(g);
    CHECK(c.rank() == 1);
    CHECK(c.graph().vertex_count() == 1);
    CHECK(c.graph().edge_count() == 1);
    CHECK(c.graph().length(0) == Rational(6));
    CHECK(c.branch_points().empty());
}

TEST_CASE("pendants are pruned: theta plus a tail") {
    MetricGraph g = theta_with_pendant();
    CoreGraph c = compute_core(g);
    CHECK(c.rank() == 2);
    CHECK(c.graph().vertex_count() == 2);
    CHECK(c.graph().edge_count() == 3);
    CHECK(c.branch_points().size() == 2);
    CHECK(c.host_vertex(c.branch_points()[0]) == 0);
    CHECK(c.host_vertex(c.branch_points()[1]) == 1);
    CHECK(weighted_isomorphic(c.graph(), theta()));

    // The hull is exactly the union of images of cyclically reduced loops.
    std::set<EdgeId> expected = loop_union_edges(g, 6);
    std::vector<bool> mask = c.host_edge_mask(g);
    for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK(mask[e] == (expected.count(e) > 0));
}

TEST_CASE("degree-2 chains are suppressed with added lengths") {
    // square with a diagonal chain: vertices 0-1-2-3 cycle, plus 0-4-2 chain
    MetricGraph g(5, {{0, 1, Rational(1)},
                      {1, 2, Rational(1)},
                      {2, 3, Rational(1)},
                      {3, 0, Rational(1)},
                      {0, 4, Rational(1, 2)},
                      {4, 2, Rational(1, 2)}});
    CoreGraph c = compute_core(g);
    CHECK(c.rank() == 2);
    CHECK(c.graph().vertex_count() == 2);  // only 0 and 2 branch
    CHECK(c.graph().edge_count() == 3);
    std::vector<Rational> lens;
    for (EdgeId e = 0; e < 3; ++e) lens.push_back(c.graph().length(e));
    std::sort(lens.begin(), lens.end());
    CHECK(lens[0] == Rational(1));
    CHECK(lens[1] == Rational(2));
    CHECK(lens[2] == Rational(2));
}

TEST_CASE("branch point classification") {
    CoreGraph theta_core = compute_core(theta());
    CHECK(is_branch_point(theta_core, 0));   // three germs at u
    CHECK(is_branch_point(theta_core, 1));
    CHECK_THROWS_AS(is_branch_point(theta_core, 9), GraphStructureError);

    CoreGraph circle_core = compute_core(circle());
    CHECK_FALSE(is_branch_point(circle_core, 0));  // degree 2

    CoreGraph f8 = compute_core(figure_eight());
    CHECK(is_branch_point(f8, 0));  // degree 4

    // Brute confirmation at the theta vertex: three pairwise-reduced germ
    // concatenations exist.
    MetricGraph t = theta();
    const auto& germs = t.germs(0);
    REQUIRE(germs.size() == 3);
    int reducedPairs = 0;
    for (std::size_t i = 0; i < germs.size(); ++i)
        for (std::size_t j = i + 1; j < germs.size(); ++j)
            if (germs[j] != germs[i]) ++reducedPairs;  // distinct germs concatenate reduced
    CHECK(reducedPairs == 3);
}

TEST_CASE("compute_core is idempotent") {
    Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        GenBounds bounds;
        bounds.rank = static_cast<int>(rng.between(0, 4));
        MetricGraph g = random_graph(rng, bounds);
        CoreGraph c = compute_core(g);
        if (c.empty()) {
            CHECK(c.rank() == 0);
            continue;
        }
        CoreGraph cc = compute_core(c.graph());
        CHECK(weighted_isomorphic(c.graph(), cc.graph()));
        // Euler characteristic consistency: rank survives pruning.
        CHECK(c.rank() == g.rank());
        CHECK(cc.rank() == c.rank());
    }
}

TEST_CASE("strong convexity: minimizers between core points stay in the core") {
    Rng rng(4242);
    for (int trial = 0; trial < 25; ++trial) {
        GenBounds bounds;
        bounds.rank = static_cast<int>(rng.between(1, 4));
        MetricGraph g = random_graph(rng, bounds);
        CoreGraph c = compute_core(g);
        if (c.empty()) continue;
        std::vector<bool> coreMask = c.host_edge_mask(g);

        auto randomCorePoint = [&]() {
            EdgeId ce = static_cast<EdgeId>(rng.below(c.graph().edge_count()));
            Rational len = c.graph().length(ce);
            Rational offset = len * Rational(rng.between(0, 8), 8);
            return c.host_point(g, ce, offset);
        };
        for (int pair = 0; pair < 10; ++pair) {
            GraphPoint x = randomCorePoint(), y = randomCorePoint();
            Rational d = distance(g, x, y);

            // Every host edge that can lie on a minimizer must be a core edge.
            auto distsTo = [&](const GraphPoint& p) {
                std::vector<Rational> out(g.vertex_count());
                if (p.is_vertex()) return g.distances_from(p.vertex());
                auto da = g.distances_from(g.edge(p.edge()).a);
                auto db = g.distances_from(g.edge(p.edge()).b);
                Rational fa = p.offset(), fb = g.length(p.edge()) - p.offset();
                for (VertexId v = 0; v < g.vertex_count(); ++v)
                    out[v] = std::min(fa + da[v], fb + db[v]);
                return out;
            };
            std::vector<Rational> dx = distsTo(x), dy = distsTo(y);
            for (EdgeId e = 0; e < g.edge_count(); ++e) {
                const EdgeRecord& rec = g.edge(e);
                bool onMinimizer =
                    dx[rec.a] + g.length(e) + dy[rec.b] == d ||
                    dx[rec.b] + g.length(e) + dy[rec.a] == d;
                if (onMinimizer) CHECK(coreMask[e]);
            }
        }
    }
}
