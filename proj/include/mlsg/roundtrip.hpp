#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlsg/core.hpp"
#include "mlsg/generate.hpp"
#include "mlsg/json_io.hpp"
#include "mlsg/oracle.hpp"
#include "mlsg/reconstruct.hpp"
#include "mlsg/rng.hpp"

namespace mlsg {

/// Seeded experiment configuration; the seed fully determines every trial.
struct RunConfig {
    std::uint64_t seed = 1;
    int rankMin = 2;
    int rankMax = 6;
    int maxCoreEdges = 12;
    std::int64_t maxNumerator = 20;
    std::int64_t maxDenominator = 20;
    int trials = 0;
    bool perturb = false;
};

struct TrialRecord {
    int index = 0;
    std::string sourceDigest;
    std::string hiddenDigest;
    bool spectrumConsistent = false;
    bool certifiedVsHidden = false;
    bool certifiedVsSource = false;
    bool matchesSourceEverywhere = false;
    bool flagged = false;  // perturb mode: the mismatch was detected
    std::size_t certificateSize = 0;
    std::string failure;
};

struct Report {
    RunConfig config;
    std::vector<TrialRecord> trials;
    int passCount = 0;
    int failCount = 0;

    bool all_passed() const { return failCount == 0; }
};

/// FNV-1a digest of a canonical serialization; stable across runs.
inline std::string fnv1a_digest(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

inline std::string graph_digest(const MetricGraph& g) {
    return fnv1a_digest(graph_to_json(g).dump());
}

/// One reconstruction round trip: generate a source graph, hide a relabeled
/// (optionally perturbed) copy of its core behind an oracle, reconstruct,
/// certify.  Honest trials pass when the reconstruction is certified
/// isometric to both the hidden core and the source core; perturbed trials
/// pass when the mismatch is flagged.
inline TrialRecord run_trial(Rng& rng, const RunConfig& cfg, int index) {
    TrialRecord rec;
    rec.index = index;

    GenBounds bounds;
    bounds.rank = static_cast<int>(rng.between(cfg.rankMin, cfg.rankMax));
    bounds.maxNumerator = cfg.maxNumerator;
    bounds.maxDenominator = cfg.maxDenominator;

    MetricGraph source = random_graph(rng, bounds);
    CoreGraph sourceCore = compute_core(source);
    for (int guard = 0; static_cast<int>(sourceCore.graph().edge_count()) > cfg.maxCoreEdges ||
                        sourceCore.rank() < cfg.rankMin;
         ++guard) {
        if (guard > 256) throw std::logic_error("run_trial: cannot satisfy core bounds");
        source = random_graph(rng, bounds);
        sourceCore = compute_core(source);
    }
    rec.sourceDigest = graph_digest(source);

    std::optional<Marking> marking = build_marking(sourceCore);
    if (!marking) throw std::logic_error("run_trial: source core lost its rank");

    HiddenInstance hidden = make_hidden_instance(rng, sourceCore, *marking, cfg.perturb);
    rec.hiddenDigest = graph_digest(hidden.core.graph());
    auto oracle = make_oracle(hidden.core, hidden.marking, hidden.phi);

    try {
        ReconstructionResult result =
            reconstruct_core(sourceCore.rank(), sourceCore, marking, *oracle);
        rec.spectrumConsistent = true;
        rec.certificateSize = result.certificate.size();
        rec.certifiedVsHidden = certify_isometry(result, hidden.core);
        rec.certifiedVsSource =
            weighted_isomorphic(result.reconstructedCore.graph(), sourceCore.graph());
        rec.matchesSourceEverywhere = true;
        for (const CertificateEntry& e : result.certificate)
            rec.matchesSourceEverywhere = rec.matchesSourceEverywhere && e.matchesSource;
    } catch (const SpectrumInconsistent& e) {
        rec.spectrumConsistent = false;
        rec.failure = e.what();
    }

    rec.flagged = !rec.spectrumConsistent || !rec.certifiedVsSource;
    return rec;
}

inline Report run_roundtrip(const RunConfig& cfg) {
    Report report;
    report.config = cfg;
    Rng rng(cfg.seed);
    for (int t = 0; t < cfg.trials; ++t) {
        TrialRecord rec = run_trial(rng, cfg, t);
        bool pass;
        if (cfg.perturb) {
            pass = rec.flagged;
        } else {
            pass = rec.spectrumConsistent && rec.certifiedVsHidden && rec.certifiedVsSource &&
                   rec.matchesSourceEverywhere;
        }
        if (pass)
            ++report.passCount;
        else
            ++report.failCount;
        report.trials.push_back(std::move(rec));
    }
    return report;
}

inline Json report_to_json(const Report& r) {
    Json j;
    j["config"] = Json{{"seed", r.config.seed},
                       {"rank_min", r.config.rankMin},
                       {"rank_max", r.config.rankMax},
                       {"max_core_edges", r.config.maxCoreEdges},
                       {"max_numerator", r.config.maxNumerator},
                       {"max_denominator", r.config.maxDenominator},
                       {"trials", r.config.trials},
                       {"perturb", r.config.perturb}};
    j["trials"] = Json::array();
    for (const TrialRecord& t : r.trials) {
        Json jt;
        jt["index"] = t.index;
        jt["source_digest"] = t.sourceDigest;
        jt["hidden_digest"] = t.hiddenDigest;
        jt["spectrum_consistent"] = t.spectrumConsistent;
        jt["certified_vs_hidden"] = t.certifiedVsHidden;
        jt["certified_vs_source"] = t.certifiedVsSource;
        jt["matches_source_everywhere"] = t.matchesSourceEverywhere;
        if (r.config.perturb) jt["flagged"] = t.flagged;
        jt["certificate_size"] = t.certificateSize;
        if (!t.failure.empty()) jt["failure"] = t.failure;
        j["trials"].push_back(jt);
    }
    j["passed"] = r.passCount;
    j["failed"] = r.failCount;
    return j;
}

}  // namespace mlsg
