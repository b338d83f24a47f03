#include <catch2/catch_amalgamated.hpp>

#include "mlsg/core.hpp"
#include "mlsg/generate.hpp"
#include "mlsg/marking.hpp"
#include "mlsg/oracle.hpp"
#include "mlsg/spectrum_enum.hpp"
#include "test_support.hpp"

using namespace mlsg;
using namespace testsupport;

namespace {

GroupWord random_word(Rng& rng, std::size_t rank, std::size_t maxLen) {
    GroupWord w;
    std::size_t len = rng.below(maxLen + 1);
    for (std::size_t i = 0; i < len; ++i)
        w.push_back({static_cast<std::uint32_t>(rng.below(rank)), rng.coin()});
    return w;
}

GroupWord W(std::initializer_list<int> letters) {
    // positive k = generator k, negative k = its inverse (1-based)
    GroupWord w;
    for (int l : letters)
        w.push_back({static_cast<std::uint32_t>((l > 0 ? l : -l) - 1), l < 0});
    return w;
}

}  // namespace

TEST_CASE("marking of a circle has one generator") {
    CoreGraph c = compute_core(circle(Rational(5)));
    auto m = build_marking(c);
    REQUIRE(m.has_value());
    CHECK(m->rank() == 1);
    CHECK(m->generatorLoops[0].path.steps == std::vector<HalfEdge>{fwd(0)});
}

TEST_CASE("marking of the figure eight has an empty tree") {
    CoreGraph c = compute_core(figure_eight());
    auto m = build_marking(c);
    REQUIRE(m.has_value());
    CHECK(m->rank() == 2);
    CHECK(m->basepoint == 0);
    CHECK(m->generatorLoops[0].path.steps == std::vector<HalfEdge>{fwd(0)});
    CHECK(m->generatorLoops[1].path.steps == std::vector<HalfEdge>{fwd(1)});
}

TEST_CASE("marking of theta uses the shortest edge as tree") {
    CoreGraph c = compute_core(theta());
    auto m = build_marking(c);
    REQUIRE(m.has_value());
    CHECK(m->rank() == 2);
    CHECK(m->basepoint == 0);
    CHECK(m->inTree[0]);
    CHECK(m->generators == std::vector<EdgeId>{1, 2});
    // g1 = e2 e1', g2 = e3 e1', based at u
    CHECK(m->generatorLoops[0].path.steps == std::vector<HalfEdge>{fwd(1), bwd(0)});
    CHECK(m->generatorLoops[1].path.steps == std::vector<HalfEdge>{fwd(2), bwd(0)});
}

TEST_CASE("empty core has no marking") {
    MetricGraph tree(2, {{0, 1, Rational(1)}});
    CHECK_FALSE(build_marking(compute_core(tree)).has_value());
}

TEST_CASE("word_to_loop on theta") {
    CoreGraph c = compute_core(theta());
    auto m = build_marking(c);
    const MetricGraph& g = c.graph();

    CHECK(word_to_loop(g, *m, {}).empty());
    CHECK(word_to_loop(g, *m, W({1})).path.steps == std::vector<HalfEdge>{fwd(1), bwd(0)});
    // g1 g2' reduces to [e2, e3']
    CHECK(word_to_loop(g, *m, W({1, -2})).path.steps ==
          std::vector<HalfEdge>{fwd(1), bwd(2)});
    CHECK_THROWS_AS(word_to_loop(g, *m, W({3})), std::out_of_range);
}

TEST_CASE("loop_to_word inverts word_to_loop") {
    Rng rng(23);
    int done = 0;
    while (done < 80) {
        GenBounds bounds;
        bounds.rank = static_cast<int>(rng.between(1, 4));
        MetricGraph g = random_graph(rng, bounds);
        CoreGraph c = compute_core(g);
        if (c.empty()) continue;
        auto m = build_marking(c);
        GroupWord w = free_reduce(random_word(rng, m->rank(), 6));
        ++done;
        EdgeLoop loop = word_to_loop(c.graph(), *m, w);
        CHECK(loop_to_word(c.graph(), *m, loop) == w);
    }
}

TEST_CASE("mls values on theta match brute force") {
    CoreGraph c = compute_core(theta());
    auto m = build_marking(c);
    const MetricGraph& g = c.graph();

    CHECK(mls(g, *m, {}) == Rational(0));
    CHECK(mls(g, *m, W({1})) == Rational(3));
    CHECK(mls(g, *m, W({2})) == Rational(4));
    CHECK(mls(g, *m, W({1, -2})) == Rational(5));

    CHECK(brute_mls(g, *m, W({1})) == Rational(3));
    CHECK(brute_mls(g, *m, W({2})) == Rational(4));
    CHECK(brute_mls(g, *m, W({1, -2})) == Rational(5));
}

TEST_CASE("mls axioms: conjugation, inversion, powers, identity") {
    Rng rng(29);
    int done = 0;
    while (done < 150) {
        GenBounds bounds;
        bounds.rank = static_cast<int>(rng.between(1, 4));
        MetricGraph host = random_graph(rng, bounds);
        CoreGraph c = compute_core(host);
        if (c.empty()) continue;
        auto m = build_marking(c);
        const MetricGraph& g = c.graph();
        GroupWord gw = random_word(rng, m->rank(), 5);
        GroupWord conj = random_word(rng, m->rank(), 4);
        int n = static_cast<int>(rng.between(-5, 5));
        ++done;

        Rational base = mls(g, *m, gw);
        CHECK(mls(g, *m, conjugate_word(gw, conj)) == base);
        CHECK(mls(g, *m, invert(gw)) == base);
        CHECK(mls(g, *m, power(gw, n)) ==
              Rational(n < 0 ? -n : n) * base);
        CHECK((base == Rational(0)) == free_reduce(gw).empty());
    }
}

TEST_CASE("mls agrees with the exhaustive class minimum on random words") {
    Rng rng(31);
    int done = 0;
    while (done < 40) {
        GenBounds bounds;
        bounds.rank = static_cast<int>(rng.between(1, 3));
        bounds.maxNumerator = 7;
        MetricGraph host = random_graph(rng, bounds);
        CoreGraph c = compute_core(host);
        if (c.empty()) continue;
        auto m = build_marking(c);
        GroupWord w = random_word(rng, m->rank(), 4);
        ++done;
        CHECK(mls(c.graph(), *m, w) == brute_mls(c.graph(), *m, w));
    }
}

TEST_CASE("oracle with identity substitution is the marked length spectrum") {
    CoreGraph c = compute_core(theta());
    auto m = build_marking(c);
    auto oracle = make_oracle(c, *m, GroupWordSubstitution::identity(2));
    Rng rng(37);
    CHECK(oracle->query({}) == Rational(0));
    for (int i = 0; i < 50; ++i) {
        GroupWord w = random_word(rng, 2, 6);
        CHECK(oracle->query(w) == mls(c.graph(), *m, w));
    }
}

TEST_CASE("oracle with inverted generators matches the spectrum on theta and roses") {
    for (const MetricGraph& host : {theta(), figure_eight(Rational(2), Rational(7))}) {
        CoreGraph c = compute_core(host);
        auto m = build_marking(c);
        GroupWordSubstitution inv;
        for (std::uint32_t i = 0; i < m->rank(); ++i)
            inv.images.push_back(GroupWord{GroupLetter{i, true}});
        auto oracle = make_oracle(c, *m, inv);
        Rng rng(41);
        for (int i = 0; i < 60; ++i) {
            GroupWord w = random_word(rng, m->rank(), 6);
            CHECK(oracle->query(w) == mls(c.graph(), *m, w));
        }
    }
}

TEST_CASE("oracle through a generator swap reports the swapped lengths") {
    CoreGraph c = compute_core(theta());
    auto m = build_marking(c);
    GroupWordSubstitution swap;
    swap.images = {W({2}), W({1})};
    auto oracle = make_oracle(c, *m, swap);
    CHECK(oracle->query(W({1})) == Rational(4));
    CHECK(oracle->query(W({2})) == Rational(3));
}

TEST_CASE("substitution images must fit the hidden rank") {
    CoreGraph c = compute_core(circle());
    auto m = build_marking(c);
    GroupWordSubstitution bad;
    bad.images = {W({2})};
    CHECK_THROWS_AS(make_oracle(c, *m, bad), std::out_of_range);
}

TEST_CASE("canonical class enumeration is deduplicated and sorted") {
    auto classes = enumerate_classes(2, 2);
    // rank 2, bound 2: 4 one-letter classes + rotation-deduped two-letter ones
    for (const GroupWord& w : classes) {
        CHECK(is_cyclically_reduced_word(w));
        CHECK(canonical_class_key(w) == w);
    }
    // g1 g1' never appears; g2 g1 appears as g1 g2
    for (const GroupWord& w : classes) {
        CHECK(free_reduce(w).size() == w.size());
        if (w.size() == 2) CHECK_FALSE(GroupWord{w[1], w[0]} < w);
    }
    // determinism
    CHECK(classes == enumerate_classes(2, 2));
}
