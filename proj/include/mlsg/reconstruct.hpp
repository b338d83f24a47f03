#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlsg/core.hpp"
#include "mlsg/isomorphism.hpp"
#include "mlsg/loop_ops.hpp"
#include "mlsg/marking.hpp"
#include "mlsg/oracle.hpp"
#include "mlsg/word.hpp"

namespace mlsg {

/// Raised when an oracle identity fails: the queried length function cannot
/// come from a space whose spectrum matches the probe structure.
struct SpectrumInconsistent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two geodesic loops through an oriented core segment that agree along the
/// segment and on no larger interval (agreement read on universal-cover
/// lifts, which keeps self-loop segments honest).  The loops are stored
/// rebased at the segment tail and as group words at the marking basepoint,
/// conjugated through `basepointConjugator`.
struct DistinguishingPair {
    EdgeId segment = kNoEdge;
    Direction orientation = Direction::Forward;
    EdgeLoop loop1;
    EdgeLoop loop2;
    GroupWord word1;
    GroupWord word2;
    EdgePath basepointConjugator;  // basepoint -> segment tail
};

namespace detail {

/// Metric length of the cyclic reduction of (loop2 · loop1^(-1)) as based
/// loops at the common segment tail.
inline Rational cyclic_product_defect(const MetricGraph& g, const EdgeLoop& l1,
                                      const EdgeLoop& l2) {
    EdgePath prod = concat(g, l2.path, reverse_path(g, l1.path));
    CyclicReduction cr = cyclically_reduce(g, EdgeLoop(reduce(prod)));
    return loop_length(g, cr.loop);
}

/// Exact agreement test for a candidate pair: cancellation in
/// loop2 · loop1^(-1) must remove the shared segment from each factor and
/// nothing else.
inline bool valid_pair(const MetricGraph& g, const HalfEdge& seg, const EdgeLoop& l1,
                       const EdgeLoop& l2) {
    if (l1 == l2) return false;
    Rational lhs = cyclic_product_defect(g, l1, l2);
    Rational rhs = loop_length(g, l1) + loop_length(g, l2) - Rational(2) * g.length(seg);
    return lhs == rhs;
}

inline GroupWord based_word(const MetricGraph& g, const Marking& m, const EdgePath& conj,
                            const EdgeLoop& loop) {
    EdgePath p = concat(g, conj, loop.path);
    p = concat(g, p, reverse_path(g, conj));
    return loop_to_word(g, m, EdgeLoop(reduce(p)));
}

}  // namespace detail

/// Builds a distinguishing pair for a core segment, following the germ
/// construction witnessing their existence: the first loop is the least closure
/// of the segment itself, the second leaves through a different germ and
/// arrives through a different germ, and candidates are validated with the
/// exact cancellation identity before being accepted.
inline DistinguishingPair build_distinguishing_pair(const CoreGraph& c, const Marking& m,
                                                    EdgeId seg, Direction orient) {
    const MetricGraph& g = c.graph();
    if (c.branch_points().empty())
        throw NotApplicableError("distinguishing pairs need branch points (rank >= 2)");
    if (seg >= g.edge_count()) throw GraphStructureError("segment not in core");

    const HalfEdge s(seg, orient);
    const VertexId tail = g.tail(s), head = g.head(s);

    auto postGerm = [&](const EdgeLoop& l) { return l.path.steps[1 % l.size()]; };
    auto preGerm = [&](const EdgeLoop& l) { return l.path.steps.back(); };

    std::vector<EdgeLoop> firstCandidates;
    if (auto l1 = close_to_cyclic_loop(g, EdgePath(tail, {s}))) firstCandidates.push_back(*l1);
    for (const HalfEdge& h : g.germs(head)) {
        if (h == s.reverse()) continue;
        if (auto l1 = close_to_cyclic_loop(g, EdgePath(tail, {s, h})))
            firstCandidates.push_back(*l1);
    }

    for (const EdgeLoop& l1 : firstCandidates) {
        for (const HalfEdge& h : g.germs(head)) {
            if (h == s.reverse() || h == postGerm(l1)) continue;
            auto l2 = close_to_cyclic_loop(g, EdgePath(tail, {s, h}), {preGerm(l1)});
            if (!l2 || !detail::valid_pair(g, s, l1, *l2)) continue;

            DistinguishingPair pair;
            pair.segment = seg;
            pair.orientation = orient;
            pair.loop1 = l1;
            pair.loop2 = *l2;
            pair.basepointConjugator = tree_path_from_base(g, m, tail);
            pair.word1 = detail::based_word(g, m, pair.basepointConjugator, l1);
            pair.word2 = detail::based_word(g, m, pair.basepointConjugator, *l2);
            return pair;
        }
    }
    throw std::logic_error("build_distinguishing_pair: no valid pair found");
}

/// One verified oracle identity; certificates are replayable by re-issuing
/// the recorded queries.
enum class CheckKind { LengthRecovery, AlphaBeta, Incidence, CircleLength };

struct CertificateEntry {
    CheckKind kind = CheckKind::LengthRecovery;
    EdgeId segment = kNoEdge;
    EdgeId segment2 = kNoEdge;
    VertexId vertex = kNoVertex;
    std::vector<GroupWord> words;    // queried words, in query order
    std::vector<Rational> observed;  // oracle answers, aligned with words
    Rational expected;               // predicted value of the checked quantity
    Rational actual;                 // value derived from the oracle answers
    bool pass = false;
    /// Informational: whether the observation also matches a replay against
    /// the source graph itself (true for every honest oracle over the
    /// source spectrum; reconstruction does not require it).
    bool matchesSource = true;
    Rational sourceValue;
    /// For incidence entries: the textbook closed form
    /// l(g1) + l(g) + l(g2) - 2 l(p1) - 2 l(p2); it coincides with the
    /// replayed prediction whenever the companion loops do not interact
    /// beyond the probed segments.
    Rational closedForm;
};

struct IncidenceVerdict {
    bool incident = false;
    CertificateEntry entry;
};

/// Recovered length of the pair's segment from three oracle queries.
inline Rational recover_length(const SpectrumOracle& o, const DistinguishingPair& d) {
    Rational o1 = o.query(d.word1);
    Rational o2 = o.query(d.word2);
    Rational o12 = o.query(free_reduce(concat_words(d.word2, invert(d.word1))));
    Rational r = (o1 + o2 - o12) / Rational(2);
    if (!r.is_positive())
        throw SpectrumInconsistent("recovered length for segment " +
                                   std::to_string(d.segment) + " is not positive (" + r.str() +
                                   ")");
    return r;
}

/// Checks that the composite class falls short of the sum of
/// the two loop lengths by exactly twice the recovered segment length,
/// i.e. strictly short at all.  A failure means the hidden basepoint
/// conjugators of the two image loops disagree.
inline bool check_alpha_equals_beta(const SpectrumOracle& o, const DistinguishingPair& d) {
    Rational o1 = o.query(d.word1);
    Rational o2 = o.query(d.word2);
    Rational o12 = o.query(free_reduce(concat_words(d.word2, invert(d.word1))));
    return o12 < o1 + o2;
}

namespace detail {

/// Length of a word's geodesic representative measured with substitute edge
/// lengths on the source combinatorics.
inline Rational mls_with_lengths(const MetricGraph& g, const Marking& m, const GroupWord& w,
                                 const std::vector<Rational>& lengths) {
    CyclicReduction cr = cyclically_reduce(g, word_to_loop(g, m, w));
    Rational total;
    for (const HalfEdge& h : cr.loop.steps()) total += lengths.at(h.edge);
    return total;
}

/// Incidence verification for a concrete germ pair at a shared vertex.
/// d1 and d2 are distinct outgoing germs at q; the probed configuration is
/// p1 = d1's edge traversed into q followed by p2 = d2's edge out of q.
inline IncidenceVerdict check_incidence_germs(const SpectrumOracle& o, const CoreGraph& c,
                                              const Marking& m, const HalfEdge& d1,
                                              const HalfEdge& d2, VertexId q,
                                              const std::vector<Rational>& recovered) {
    const MetricGraph& g = c.graph();
    const HalfEdge s1 = d1.reverse();  // arrives at q
    const HalfEdge s2 = d2;            // leaves q
    const VertexId u1 = g.tail(s1);

    auto common = close_to_cyclic_loop(g, EdgePath(u1, {s1, s2}));
    if (!common) throw std::logic_error("check_incidence: no common loop (not a core?)");
    const EdgeLoop gamma = *common;  // based at u1, starts [s1, s2]

    // Companion through p1: diverges from gamma after and before s1.
    EdgeLoop gamma1;
    {
        bool found = false;
        for (const HalfEdge& h : g.germs(q)) {
            if (h == s1.reverse() || h == s2) continue;
            auto l = close_to_cyclic_loop(g, EdgePath(u1, {s1, h}), {gamma.path.steps.back()});
            if (l && valid_pair(g, s1, gamma, *l)) {
                gamma1 = *l;
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("check_incidence: no companion for first segment");
    }

    // Companion through p2, probed against gamma rotated to start with s2.
    const EdgeLoop gammaAtQ = rotate_loop(g, gamma, 1);
    EdgeLoop gamma2;
    {
        bool found = false;
        for (const HalfEdge& h : g.germs(g.head(s2))) {
            if (h == s2.reverse() || h == gammaAtQ.path.steps[1 % gammaAtQ.size()]) continue;
            auto l = close_to_cyclic_loop(g, EdgePath(q, {s2, h}), {s1});
            if (l && valid_pair(g, s2, gammaAtQ, *l)) {
                gamma2 = *l;
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("check_incidence: no companion for second segment");
    }

    const EdgePath conj = tree_path_from_base(g, m, u1);
    GroupWord wCommon = based_word(g, m, conj, gamma);
    GroupWord wFirst = based_word(g, m, conj, gamma1);
    // gamma2 is based at q; route it through s1 to share the basepoint.
    EdgePath conj2 = reduce(concat(g, conj, EdgePath(u1, {s1})));
    GroupWord wSecond = based_word(g, m, conj2, gamma2);

    GroupWord composite =
        free_reduce(concat_words(wFirst, concat_words(wCommon, wSecond)));

    CertificateEntry entry;
    entry.kind = CheckKind::Incidence;
    entry.segment = s1.edge;
    entry.segment2 = s2.edge;
    entry.vertex = q;
    entry.words = {wFirst, wCommon, wSecond, composite};
    for (const GroupWord& w : entry.words) entry.observed.push_back(o.query(w));

    entry.actual = entry.observed[3];
    entry.expected = mls_with_lengths(g, m, composite, recovered);
    entry.sourceValue = mls(g, m, composite);
    entry.closedForm = mls(g, m, wFirst) + mls(g, m, wCommon) + mls(g, m, wSecond) -
                           Rational(2) * g.length(s1) - Rational(2) * g.length(s2);
    entry.pass = entry.actual == entry.expected;
    entry.matchesSource = entry.actual == entry.sourceValue;

    IncidenceVerdict verdict;
    verdict.incident = entry.pass;
    verdict.entry = std::move(entry);
    return verdict;
}

}  // namespace detail

/// Incidence check for two core segments meeting at a vertex, measured
/// against the recovered edge lengths (the reconstruction's own prediction
/// of the hidden composite value).  The non-incident image configurations
/// each shift the composite value and are exactly what equality rules out.
inline IncidenceVerdict check_incidence(const SpectrumOracle& o, const CoreGraph& c,
                                        const Marking& m, EdgeId seg1, EdgeId seg2,
                                        VertexId sharedVertex,
                                        const std::vector<Rational>& recoveredLengths) {
    const MetricGraph& g = c.graph();
    std::optional<HalfEdge> d1, d2;
    for (const HalfEdge& h : g.germs(sharedVertex)) {
        if (h.edge == seg1 && !d1) {
            d1 = h;
            continue;
        }
        if (h.edge == seg2 && !d2 && (!d1 || h != *d1)) d2 = h;
    }
    if (!d1 || !d2)
        throw GraphStructureError("segments are not incident at the shared vertex");
    return detail::check_incidence_germs(o, c, m, *d1, *d2, sharedVertex, recoveredLengths);
}

/// Outcome of a reconstruction: a core carrying the source combinatorics
/// with oracle-recovered lengths, plus the identity chain that certifies it.
struct ReconstructionResult {
    CoreGraph reconstructedCore;
    std::vector<VertexId> vertexMap;  // source core vertex -> reconstructed vertex
    std::vector<CertificateEntry> certificate;
};

namespace detail {

inline CoreGraph standalone_core(const MetricGraph& g) {
    std::vector<VertexId> v2h(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v) v2h[v] = v;
    std::vector<EdgePath> e2p;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        e2p.push_back(EdgePath(g.edge(e).a, {HalfEdge(e, Direction::Forward)}));
    std::vector<VertexId> branch;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) >= 3) branch.push_back(v);
    MetricGraph copy = g;
    return CoreGraph(std::move(copy), std::move(v2h), std::move(e2p), std::move(branch));
}

}  // namespace detail

/// Reconstructs the hidden core from oracle access alone: circle lengths
/// for rank 1, and for rank >= 2 a full sweep of length recoveries and
/// incidence verifications over the source combinatorics.  Throws
/// SpectrumInconsistent at the first failing identity.
inline ReconstructionResult reconstruct_core(int rank, const CoreGraph& sourceCore,
                                             const std::optional<Marking>& marking,
                                             const SpectrumOracle& oracle) {
    ReconstructionResult result;
    if (rank <= 0) return result;

    if (!marking) throw std::invalid_argument("reconstruct_core: marking required for rank >= 1");
    const Marking& m = *marking;
    const MetricGraph& g = sourceCore.graph();

    if (rank == 1) {
        GroupWord w = {GroupLetter{0, false}};
        Rational len = oracle.query(w);
        CertificateEntry entry;
        entry.kind = CheckKind::CircleLength;
        entry.segment = m.generators.at(0);
        entry.words = {w};
        entry.observed = {len};
        entry.actual = len;
        entry.expected = len;
        entry.sourceValue = mls(g, m, w);
        entry.matchesSource = len == entry.sourceValue;
        entry.pass = len.is_positive();
        if (!entry.pass)
            throw SpectrumInconsistent("circle length is not positive: " + len.str());
        result.certificate.push_back(entry);
        MetricGraph circle(1, {{0, 0, len}});
        result.reconstructedCore = detail::standalone_core(circle);
        result.vertexMap = {0};
        return result;
    }

    // Length recovery per core segment.
    std::vector<Rational> recovered(g.edge_count());
    std::vector<DistinguishingPair> pairs;
    pairs.reserve(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        DistinguishingPair pair = build_distinguishing_pair(sourceCore, m, e, Direction::Forward);
        GroupWord w12 = free_reduce(concat_words(pair.word2, invert(pair.word1)));
        Rational o1 = oracle.query(pair.word1);
        Rational o2 = oracle.query(pair.word2);
        Rational o12 = oracle.query(w12);
        Rational r = (o1 + o2 - o12) / Rational(2);

        CertificateEntry rec;
        rec.kind = CheckKind::LengthRecovery;
        rec.segment = e;
        rec.words = {pair.word1, pair.word2, w12};
        rec.observed = {o1, o2, o12};
        rec.actual = r;
        rec.expected = g.length(e);
        rec.sourceValue = g.length(e);
        rec.matchesSource = r == g.length(e);
        rec.pass = r.is_positive();
        result.certificate.push_back(rec);
        if (!rec.pass)
            throw SpectrumInconsistent("recovered length for segment " + std::to_string(e) +
                                       " is not positive (" + r.str() + ")");

        CertificateEntry ab;
        ab.kind = CheckKind::AlphaBeta;
        ab.segment = e;
        ab.words = rec.words;
        ab.observed = rec.observed;
        ab.actual = o12;
        ab.expected = o1 + o2;
        ab.sourceValue = mls(g, m, w12);
        ab.matchesSource = o12 == ab.sourceValue;
        ab.pass = o12 < o1 + o2;
        result.certificate.push_back(ab);
        if (!ab.pass)
            throw SpectrumInconsistent("image loops for segment " + std::to_string(e) +
                                       " share no positive overlap");

        recovered[e] = r;
        pairs.push_back(std::move(pair));
    }

    // Incidence verification for every germ pair at every core vertex.
    for (VertexId q = 0; q < g.vertex_count(); ++q) {
        const auto& germs = g.germs(q);
        for (std::size_t i = 0; i < germs.size(); ++i) {
            for (std::size_t j = i + 1; j < germs.size(); ++j) {
                IncidenceVerdict verdict =
                    detail::check_incidence_germs(oracle, sourceCore, m, germs[i], germs[j], q,
                                                  recovered);
                result.certificate.push_back(verdict.entry);
                if (!verdict.incident)
                    throw SpectrumInconsistent(
                        "incidence identity failed at vertex " + std::to_string(q) +
                        " for segments " + std::to_string(verdict.entry.segment) + ", " +
                        std::to_string(verdict.entry.segment2));
            }
        }
    }

    // Assemble the reconstructed core on the source combinatorics.
    std::vector<EdgeRecord> edges;
    edges.reserve(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        edges.push_back({g.edge(e).a, g.edge(e).b, recovered[e]});
    MetricGraph rebuilt(g.vertex_count(), edges);
    result.reconstructedCore = detail::standalone_core(rebuilt);
    result.vertexMap.resize(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v) result.vertexMap[v] = v;
    return result;
}

/// Exact certification against ground truth: a length-preserving graph
/// isomorphism between the reconstructed core and the hidden core.
inline bool certify_isometry(const ReconstructionResult& r, const CoreGraph& truth) {
    return weighted_isomorphic(r.reconstructedCore.graph(), truth.graph());
}

/// Re-issues every certificate query and compares against the recorded
/// answers.
inline bool replay_certificate(const SpectrumOracle& o,
                               const std::vector<CertificateEntry>& certificate) {
    for (const CertificateEntry& entry : certificate) {
        if (entry.words.size() != entry.observed.size()) return false;
        for (std::size_t i = 0; i < entry.words.size(); ++i)
            if (o.query(entry.words[i]) != entry.observed[i]) return false;
    }
    return true;
}

}  // namespace mlsg
