#include <catch2/catch_amalgamated.hpp>

#include "mlsg/generate.hpp"
#include "mlsg/reconstruct.hpp"
#include "mlsg/roundtrip.hpp"
#include "test_support.hpp"

using namespace mlsg;
using namespace testsupport;

namespace {

GroupWord W(std::initializer_list<int> letters) {
    GroupWord w;
    for (int l : letters)
        w.push_back({static_cast<std::uint32_t>((l > 0 ? l : -l) - 1), l < 0});
    return w;
}

/// Oracle answering the number of letters of the reduced word; internally
/// consistent enough to probe, but no graph has this spectrum.
struct LetterCountOracle final : SpectrumOracle {
    Rational query(const GroupWord& w) const override {
        return Rational(static_cast<std::int64_t>(free_reduce(w).size()));
    }
};

/// All cyclically reduced loops of at most maxSteps steps whose first step
/// is `s`, by exhaustive non-backtracking search.
std::vector<EdgeLoop> loops_through(const MetricGraph& g, const HalfEdge& s,
                                    std::size_t maxSteps) {
    std::vector<EdgeLoop> out;
    std::vector<HalfEdge> walk = {s};
    auto dfs = [&](auto&& self) -> void {
        if (g.head(walk.back()) == g.tail(s) && walk.back() != s.reverse() &&
            walk.back().reverse() != s) {
            if (walk.size() < 2 || walk.front() != walk.back().reverse())
                out.push_back(EdgeLoop(EdgePath(g.tail(s), walk)));
        }
        if (walk.size() >= maxSteps) return;
        for (const HalfEdge& h : g.germs(g.head(walk.back()))) {
            if (h == walk.back().reverse()) continue;
            walk.push_back(h);
            self(self);
            walk.pop_back();
        }
    };
    dfs(dfs);
    return out;
}

}  // namespace

TEST_CASE("distinguishing pair for the figure-eight self-loop") {
    CoreGraph c = compute_core(figure_eight());
    auto m = build_marking(c);
    DistinguishingPair pair = build_distinguishing_pair(c, *m, 0, Direction::Forward);
    CHECK(pair.loop1.path.steps == std::vector<HalfEdge>{fwd(0)});
    CHECK(pair.loop2.path.steps == std::vector<HalfEdge>{fwd(0), fwd(1)});
    CHECK(pair.word1 == W({1}));
    CHECK(pair.word2 == W({1, 2}));
}

TEST_CASE("distinguishing pairs on theta match the expected loops") {
    CoreGraph c = compute_core(theta());
    auto m = build_marking(c);
    const MetricGraph& g = c.graph();

    DistinguishingPair p0 = build_distinguishing_pair(c, *m, 0, Direction::Forward);
    CHECK(p0.loop1.path.steps == std::vector<HalfEdge>{fwd(0), bwd(1)});
    CHECK(p0.loop2.path.steps == std::vector<HalfEdge>{fwd(0), bwd(2)});
    CHECK(loop_length(g, p0.loop1) == Rational(3));
    CHECK(loop_length(g, p0.loop2) == Rational(4));

    DistinguishingPair p1 = build_distinguishing_pair(c, *m, 1, Direction::Forward);
    CHECK(p1.loop1.path.steps == std::vector<HalfEdge>{fwd(1), bwd(0)});
    CHECK(p1.loop2.path.steps == std::vector<HalfEdge>{fwd(1), bwd(2)});
    CHECK(loop_length(g, p1.loop1) == Rational(3));
    CHECK(loop_length(g, p1.loop2) == Rational(5));
}

TEST_CASE("no distinguishing pairs on a circle") {
    CoreGraph c = compute_core(circle());
    auto m = build_marking(c);
    CHECK_THROWS_AS(build_distinguishing_pair(c, *m, 0, Direction::Forward),
                    NotApplicableError);
}

TEST_CASE("recover_length on the identity oracle returns the true lengths") {
    CoreGraph c = compute_core(theta());
    auto m = build_marking(c);
    auto oracle = make_oracle(c, *m, GroupWordSubstitution::identity(2));

    DistinguishingPair p0 = build_distinguishing_pair(c, *m, 0, Direction::Forward);
    CHECK(recover_length(*oracle, p0) == Rational(1));  // (3 + 4 - 5) / 2
    DistinguishingPair p1 = build_distinguishing_pair(c, *m, 1, Direction::Forward);
    CHECK(recover_length(*oracle, p1) == Rational(2));  // (3 + 5 - 4) / 2
}

TEST_CASE("recover_length through a generator swap sees the hidden lengths") {
    // source theta (1,3,2): tree edge 1, generators from edges of length 3, 2
    MetricGraph source(2, {{0, 1, Rational(1)}, {0, 1, Rational(3)}, {0, 1, Rational(2)}});
    CoreGraph sc = compute_core(source);
    auto sm = build_marking(sc);

    CoreGraph hc = compute_core(theta());  // hidden theta (1,2,3)
    auto hm = build_marking(hc);
    GroupWordSubstitution swap;
    swap.images = {W({2}), W({1})};
    auto oracle = make_oracle(hc, *hm, swap);

    // The swap lines the spectra up, so recovery returns the source lengths.
    for (EdgeId e = 0; e < 3; ++e) {
        DistinguishingPair p = build_distinguishing_pair(sc, *sm, e, Direction::Forward);
        CHECK(recover_length(*oracle, p) == sc.graph().length(e));
    }
}

TEST_CASE("alpha-beta check accepts honest oracles and rejects flat ones") {
    CoreGraph c = compute_core(theta());
    auto m = build_marking(c);
    auto honest = make_oracle(c, *m, GroupWordSubstitution::identity(2));
    DistinguishingPair p0 = build_distinguishing_pair(c, *m, 0, Direction::Forward);
    CHECK(check_alpha_equals_beta(*honest, p0));  // 5 < 3 + 4

    LetterCountOracle flat;  // o(w2 w1^{-1}) == o(w1) + o(w2), no overlap
    CHECK_FALSE(check_alpha_equals_beta(flat, p0));
    CHECK_THROWS_AS(recover_length(flat, p0), SpectrumInconsistent);

    CoreGraph rose = compute_core(figure_eight(Rational(2), Rational(3)));
    auto rm = build_marking(rose);
    auto roseOracle = make_oracle(rose, *rm, GroupWordSubstitution::identity(2));
    DistinguishingPair pa = build_distinguishing_pair(rose, *rm, 0, Direction::Forward);
    CHECK(check_alpha_equals_beta(*roseOracle, pa));
}

TEST_CASE("incidence on theta matches the closed form exactly") {
    CoreGraph c = compute_core(theta());
    auto m = build_marking(c);
    auto oracle = make_oracle(c, *m, GroupWordSubstitution::identity(2));
    std::vector<Rational> recovered = {Rational(1), Rational(2), Rational(3)};

    IncidenceVerdict v = check_incidence(*oracle, c, *m, 0, 1, 1, recovered);
    CHECK(v.incident);
    CHECK(v.entry.matchesSource);
    CHECK(v.entry.actual == Rational(6));
    CHECK(v.entry.closedForm == Rational(6));
    CHECK(v.entry.expected == Rational(6));
}

TEST_CASE("a perturbed hidden length shows up against the source replay") {
    CoreGraph source = compute_core(theta());
    auto sm = build_marking(source);

    MetricGraph perturbedHost(
        2, {{0, 1, Rational(8, 7)}, {0, 1, Rational(2)}, {0, 1, Rational(3)}});
    CoreGraph hidden = compute_core(perturbedHost);
    auto hm = build_marking(hidden);
    auto oracle = make_oracle(hidden, *hm, GroupWordSubstitution::identity(2));

    // Reconstruction succeeds and faithfully reports the perturbed space,
    // but the certificate shows the source spectrum disagreeing.
    ReconstructionResult r = reconstruct_core(2, source, sm, *oracle);
    CHECK(r.reconstructedCore.graph().length(0) == Rational(8, 7));
    bool anyMismatch = false;
    bool incidenceMismatch = false;
    for (const CertificateEntry& e : r.certificate) {
        anyMismatch = anyMismatch || !e.matchesSource;
        if (e.kind == CheckKind::Incidence)
            incidenceMismatch = incidenceMismatch || !e.matchesSource;
    }
    CHECK(anyMismatch);
    CHECK(incidenceMismatch);
    CHECK(certify_isometry(r, hidden));
    CHECK_FALSE(weighted_isomorphic(r.reconstructedCore.graph(), source.graph()));
}

TEST_CASE("self-reconstruction reproduces the core exactly") {
    for (const MetricGraph& host : {theta(), figure_eight()}) {
        CoreGraph c = compute_core(host);
        auto m = build_marking(c);
        auto oracle = make_oracle(c, *m, GroupWordSubstitution::identity(m->rank()));
        ReconstructionResult r = reconstruct_core(c.rank(), c, m, *oracle);
        CHECK(certify_isometry(r, c));
        for (EdgeId e = 0; e < c.graph().edge_count(); ++e)
            CHECK(r.reconstructedCore.graph().length(e) == c.graph().length(e));
        for (const CertificateEntry& entry : r.certificate) {
            CHECK(entry.pass);
            CHECK(entry.matchesSource);
        }
        CHECK(replay_certificate(*oracle, r.certificate));
    }
}

TEST_CASE("reconstruction through a theta generator swap is isometric") {
    CoreGraph c = compute_core(theta());
    auto m = build_marking(c);
    GroupWordSubstitution swap;
    swap.images = {W({2}), W({1})};
    auto oracle = make_oracle(c, *m, swap);
    // Source theta (1,3,2) sees the hidden theta (1,2,3) through the swap.
    MetricGraph source(2, {{0, 1, Rational(1)}, {0, 1, Rational(3)}, {0, 1, Rational(2)}});
    CoreGraph sc = compute_core(source);
    auto sm = build_marking(sc);
    ReconstructionResult r = reconstruct_core(2, sc, sm, *oracle);
    CHECK(certify_isometry(r, c));
    for (const CertificateEntry& entry : r.certificate) CHECK(entry.matchesSource);
}

TEST_CASE("figure-eight with swapped petals reconstructs the swapped lengths") {
    CoreGraph c = compute_core(figure_eight(Rational(2), Rational(3)));
    auto m = build_marking(c);
    GroupWordSubstitution swap;
    swap.images = {W({2}), W({1})};
    auto oracle = make_oracle(c, *m, swap);
    ReconstructionResult r = reconstruct_core(2, c, m, *oracle);
    CHECK(r.reconstructedCore.graph().length(0) == Rational(3));
    CHECK(r.reconstructedCore.graph().length(1) == Rational(2));
    CHECK(certify_isometry(r, c));  // {2,3} as a multiset either way
}

TEST_CASE("rank 0 and rank 1 reconstructions") {
    ReconstructionResult empty = reconstruct_core(0, CoreGraph(), std::nullopt,
                                                  LetterCountOracle());
    CHECK(empty.reconstructedCore.empty());
    CHECK(empty.certificate.empty());

    CoreGraph c = compute_core(circle(Rational(5)));
    auto m = build_marking(c);
    auto oracle = make_oracle(c, *m, GroupWordSubstitution::identity(1));
    ReconstructionResult r = reconstruct_core(1, c, m, *oracle);
    CHECK(r.reconstructedCore.graph().length(0) == Rational(5));
    CHECK(certify_isometry(r, c));
}

TEST_CASE("certify_isometry distinguishes near-misses") {
    CoreGraph a = compute_core(theta());
    MetricGraph other(2, {{0, 1, Rational(1)}, {0, 1, Rational(2)}, {0, 1, Rational(4)}});
    CoreGraph b = compute_core(other);
    ReconstructionResult fake;
    fake.reconstructedCore = a;
    CHECK(certify_isometry(fake, a));
    CHECK_FALSE(certify_isometry(fake, b));
}

TEST_CASE("well-definedness: every valid pair recovers the same length") {
    Rng rng(53);
    int graphs = 0;
    while (graphs < 8) {
        GenBounds bounds;
        bounds.rank = static_cast<int>(rng.between(2, 3));
        bounds.maxNumerator = 9;
        bounds.maxDenominator = 4;
        MetricGraph host = random_graph(rng, bounds);
        CoreGraph c = compute_core(host);
        if (c.rank() < 2) continue;
        ++graphs;
        auto m = build_marking(c);
        auto oracle = make_oracle(c, *m, GroupWordSubstitution::identity(m->rank()));
        const MetricGraph& g = c.graph();

        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            HalfEdge s = fwd(e);
            auto loops = loops_through(g, s, 7);
            EdgePath conj = tree_path_from_base(g, *m, g.tail(s));
            int pairsChecked = 0;
            for (std::size_t i = 0; i < loops.size() && pairsChecked < 40; ++i) {
                for (std::size_t j = 0; j < loops.size() && pairsChecked < 40; ++j) {
                    if (i == j) continue;
                    if (!mlsg::detail::valid_pair(g, s, loops[i], loops[j])) continue;
                    ++pairsChecked;
                    DistinguishingPair p;
                    p.segment = e;
                    p.loop1 = loops[i];
                    p.loop2 = loops[j];
                    p.basepointConjugator = conj;
                    p.word1 = mlsg::detail::based_word(g, *m, conj, loops[i]);
                    p.word2 = mlsg::detail::based_word(g, *m, conj, loops[j]);
                    CHECK(recover_length(*oracle, p) == g.length(e));
                }
            }
            CHECK(pairsChecked > 0);
        }
    }
}

TEST_CASE("round trips over random relabeled instances") {
    RunConfig cfg;
    cfg.seed = 20240817;
    cfg.trials = 40;
    cfg.rankMin = 2;
    cfg.rankMax = 5;
    Report report = run_roundtrip(cfg);
    CHECK(report.passCount == cfg.trials);
    CHECK(report.all_passed());
}

TEST_CASE("perturbed round trips are always flagged") {
    RunConfig cfg;
    cfg.seed = 907;
    cfg.trials = 30;
    cfg.perturb = true;
    Report report = run_roundtrip(cfg);
    CHECK(report.passCount == cfg.trials);
    for (const TrialRecord& t : report.trials) CHECK(t.flagged);
}

TEST_CASE("an oracle of the wrong shape cannot certify") {
    // Source is a figure-eight; the oracle secretly answers from a theta.
    CoreGraph source = compute_core(figure_eight(Rational(2), Rational(3)));
    auto sm = build_marking(source);
    CoreGraph hidden = compute_core(theta());
    auto hm = build_marking(hidden);
    auto oracle = make_oracle(hidden, *hm, GroupWordSubstitution::identity(2));

    bool flagged = false;
    try {
        ReconstructionResult r = reconstruct_core(2, source, sm, *oracle);
        flagged = !certify_isometry(r, hidden);
    } catch (const SpectrumInconsistent&) {
        flagged = true;
    }
    CHECK(flagged);
}

TEST_CASE("empty report passes") {
    RunConfig cfg;
    cfg.trials = 0;
    Report report = run_roundtrip(cfg);
    CHECK(report.all_passed());
    CHECK(report.trials.empty());
}
