// Command-line surface for metric-graph length-spectrum experiments:
// generation, cores, spectra, word reduction, oracle reconstruction,
// isometry comparison, cover-tree translation lengths, round trips, and
// spectrum fuzzing.

#include <cctype>
#include <chrono>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mlsg/core.hpp"
#include "mlsg/cover_tree.hpp"
#include "mlsg/dot_io.hpp"
#include "mlsg/generate.hpp"
#include "mlsg/isomorphism.hpp"
#include "mlsg/json_io.hpp"
#include "mlsg/loop_ops.hpp"
#include "mlsg/marking.hpp"
#include "mlsg/oracle.hpp"
#include "mlsg/reconstruct.hpp"
#include "mlsg/roundtrip.hpp"
#include "mlsg/spectrum_enum.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInputError = 2;

void emit(const std::string& text, const std::string& path) {
    if (path.empty())
        std::cout << text;
    else
        mlsg::write_file(path, text);
}

mlsg::EdgePath parse_edge_path(const mlsg::MetricGraph& g, const std::string& text,
                               std::optional<mlsg::VertexId> start) {
    std::vector<mlsg::HalfEdge> steps;
    std::size_t i = 0;
    int tokenIndex = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        ++tokenIndex;
        if (text[i] != 'e')
            throw mlsg::ParseError("path token #" + std::to_string(tokenIndex) +
                                   ": expected eK or eK'");
        ++i;
        std::uint64_t idx = 0;
        std::size_t digits = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            idx = idx * 10 + static_cast<std::uint64_t>(text[i] - '0');
            ++i;
            ++digits;
        }
        if (digits == 0 || idx == 0 || idx > g.edge_count())
            throw mlsg::ParseError("path token #" + std::to_string(tokenIndex) +
                                   ": edge index out of range");
        mlsg::Direction dir = mlsg::Direction::Forward;
        if (i < text.size() && text[i] == '\'') {
            dir = mlsg::Direction::Backward;
            ++i;
        }
        steps.push_back(mlsg::HalfEdge(static_cast<mlsg::EdgeId>(idx - 1), dir));
    }
    if (steps.empty()) {
        if (!start) throw mlsg::ParseError("empty path needs --start");
        return mlsg::EdgePath(*start);
    }
    mlsg::EdgePath p = mlsg::path_from_steps(g, steps);
    if (start && *start != p.start) throw mlsg::ParseError("--start contradicts first step");
    return p;
}

std::string path_to_string(const mlsg::EdgePath& p) {
    std::string s;
    for (const mlsg::HalfEdge& h : p.steps) {
        if (!s.empty()) s += ' ';
        s += 'e';
        s += std::to_string(h.edge + 1);
        if (h.dir == mlsg::Direction::Backward) s += '\'';
    }
    return s;
}

int cmd_gen(std::uint64_t seed, int rank, int vertices, std::int64_t maxNum, std::int64_t maxDen,
            const std::string& jsonOut, const std::string& dotOut) {
    mlsg::Rng rng(seed);
    mlsg::GenBounds bounds;
    bounds.rank = rank;
    bounds.vertices = vertices;
    bounds.maxNumerator = maxNum;
    bounds.maxDenominator = maxDen;
    mlsg::MetricGraph g = mlsg::random_graph(rng, bounds);
    emit(mlsg::dump_json(mlsg::graph_to_json(g)), jsonOut);
    if (!dotOut.empty()) mlsg::write_file(dotOut, mlsg::graph_to_dot(g));
    return kExitOk;
}

int cmd_core(const std::string& graphFile, const std::string& jsonOut, const std::string& dotOut) {
    mlsg::MetricGraph g = mlsg::graph_from_json(mlsg::load_json_file(graphFile));
    mlsg::CoreGraph core = mlsg::compute_core(g);
    if (core.empty())
        std::cerr << "rank 0: the space has no geodesic loops; the core is empty\n";
    emit(mlsg::dump_json(mlsg::core_to_json(core)), jsonOut);
    if (!dotOut.empty()) mlsg::write_file(dotOut, mlsg::core_to_dot(core));
    return kExitOk;
}

int cmd_spectrum(const std::string& graphFile, std::size_t bound, const std::string& word,
                 const std::string& jsonOut) {
    mlsg::MetricGraph g = mlsg::graph_from_json(mlsg::load_json_file(graphFile));
    mlsg::CoreGraph core = mlsg::compute_core(g);
    auto marking = mlsg::build_marking(core);
    if (!marking) {
        std::cerr << "rank 0: trivial fundamental group, empty spectrum\n";
        emit(mlsg::dump_json(mlsg::Json::array()), jsonOut);
        return kExitOk;
    }
    if (!word.empty()) {
        mlsg::GroupWord w = mlsg::parse_word(word, marking->rank());
        std::cout << mlsg::mls(core.graph(), *marking, w).str() << "\n";
        return kExitOk;
    }
    auto table = mlsg::spectrum_table(core.graph(), *marking, bound);
    emit(mlsg::dump_json(mlsg::spectrum_dump_to_json(table)), jsonOut);
    return kExitOk;
}

int cmd_reduce(const std::string& graphFile, const std::string& pathText, int startIndex,
               bool cyclic) {
    mlsg::MetricGraph g = mlsg::graph_from_json(mlsg::load_json_file(graphFile));
    std::optional<mlsg::VertexId> start;
    if (startIndex >= 0) start = static_cast<mlsg::VertexId>(startIndex);
    mlsg::EdgePath p = parse_edge_path(g, pathText, start);
    if (cyclic) {
        if (p.head(g) != p.start) throw mlsg::ParseError("--cyclic needs a closed path");
        mlsg::CyclicReduction cr = mlsg::cyclically_reduce(g, mlsg::EdgeLoop(p));
        std::cout << "loop: " << path_to_string(cr.loop.path) << "\n";
        std::cout << "conjugator: " << path_to_string(cr.conjugator) << "\n";
        std::cout << "length: " << mlsg::loop_length(g, cr.loop).str() << "\n";
    } else {
        mlsg::EdgePath r = mlsg::reduce(p);
        std::cout << "reduced: " << path_to_string(r) << "\n";
        std::cout << "length: " << mlsg::path_length(g, r).str() << "\n";
    }
    return kExitOk;
}

int cmd_reconstruct(const std::string& sourceFile, const std::string& phiFile,
                    const std::string& hiddenFile, const std::string& spectrumFile,
                    const std::string& jsonOut, const std::string& dotOut,
                    const std::string& dumpQueriesOut) {
    mlsg::MetricGraph source = mlsg::graph_from_json(mlsg::load_json_file(sourceFile));
    mlsg::CoreGraph sourceCore = mlsg::compute_core(source);
    auto marking = mlsg::build_marking(sourceCore);

    // Oracle answering zero on every class: what a rank-0 hidden space sows.
    struct ZeroOracle final : mlsg::SpectrumOracle {
        mlsg::Rational query(const mlsg::GroupWord&) const override { return {}; }
    };

    std::unique_ptr<mlsg::SpectrumOracle> oracle;
    std::optional<mlsg::CoreGraph> truth;
    if (!hiddenFile.empty()) {
        mlsg::MetricGraph hidden = mlsg::graph_from_json(mlsg::load_json_file(hiddenFile));
        mlsg::CoreGraph hiddenCore = mlsg::compute_core(hidden);
        auto hiddenMarking = mlsg::build_marking(hiddenCore);
        std::size_t hiddenRank = hiddenMarking ? hiddenMarking->rank() : 0;
        mlsg::GroupWordSubstitution phi;
        if (marking && hiddenMarking) {
            if (phiFile.empty()) {
                phi = mlsg::GroupWordSubstitution::identity(marking->rank());
                if (hiddenRank < marking->rank())
                    throw mlsg::ParseError("hidden rank too small for identity substitution");
            } else {
                phi = mlsg::substitution_from_json(mlsg::load_json_file(phiFile),
                                                   marking->rank(), hiddenRank);
            }
        }
        if (hiddenMarking)
            oracle = mlsg::make_oracle(hiddenCore, *hiddenMarking, phi);
        else
            oracle = std::make_unique<ZeroOracle>();
        truth = std::move(hiddenCore);
    } else {
        std::size_t rank = marking ? marking->rank() : 0;
        auto table = mlsg::spectrum_dump_from_json(mlsg::load_json_file(spectrumFile), rank);
        oracle = std::make_unique<mlsg::DumpBackedOracle>(std::move(table));
    }

    mlsg::ReconstructionResult result;
    bool consistent = true;
    std::string failure;
    try {
        if (sourceCore.rank() == 0) {
            result = mlsg::ReconstructionResult();
        } else {
            result = mlsg::reconstruct_core(sourceCore.rank(), sourceCore, marking, *oracle);
        }
    } catch (const mlsg::SpectrumInconsistent& e) {
        consistent = false;
        failure = e.what();
    }

    bool matchesSource = true;
    for (const mlsg::CertificateEntry& e : result.certificate)
        matchesSource = matchesSource && e.matchesSource;

    mlsg::Json out;
    out["source_rank"] = sourceCore.rank();
    out["spectrum_consistent"] = consistent;
    if (!failure.empty()) out["failure"] = failure;
    if (consistent) {
        mlsg::Json rj = mlsg::reconstruction_to_json(result);
        for (auto& [key, value] : rj.items()) out[key] = value;
        out["matches_source_spectrum"] = matchesSource;
        if (truth) out["certified_isometric_to_hidden_core"] = mlsg::certify_isometry(result, *truth);
    }
    emit(mlsg::dump_json(out), jsonOut);
    if (consistent && !dotOut.empty())
        mlsg::write_file(dotOut, mlsg::core_to_dot(result.reconstructedCore));

    if (!dumpQueriesOut.empty() && consistent && oracle) {
        // Export every queried class so the run can be replayed from a file.
        std::map<std::string, mlsg::Rational> queries;
        for (const mlsg::CertificateEntry& e : result.certificate)
            for (std::size_t i = 0; i < e.words.size(); ++i)
                queries[mlsg::word_to_string(mlsg::canonical_class_key(e.words[i]))] =
                    e.observed[i];
        std::vector<std::pair<mlsg::GroupWord, mlsg::Rational>> rows;
        std::size_t rank = marking ? marking->rank() : 0;
        for (const auto& [key, len] : queries)
            rows.push_back({mlsg::parse_word(key, rank), len});
        mlsg::write_file(dumpQueriesOut, mlsg::dump_json(mlsg::spectrum_dump_to_json(rows)));
    }

    if (!consistent || !matchesSource) return kExitNegative;
    if (truth && !mlsg::certify_isometry(result, *truth)) return kExitNegative;
    return kExitOk;
}

int cmd_compare(const std::string& file1, const std::string& file2) {
    mlsg::MetricGraph g1 = mlsg::graph_from_json(mlsg::load_json_file(file1));
    mlsg::MetricGraph g2 = mlsg::graph_from_json(mlsg::load_json_file(file2));
    mlsg::CoreGraph c1 = mlsg::compute_core(g1);
    mlsg::CoreGraph c2 = mlsg::compute_core(g2);
    bool iso = mlsg::weighted_isomorphic(c1.graph(), c2.graph());
    std::cout << (iso ? "cores isometric\n" : "cores not isometric\n");
    return iso ? kExitOk : kExitNegative;
}

int cmd_tree_translen(const std::string& graphFile, std::size_t bound, int radius,
                      const std::string& word, const std::string& dotOut) {
    mlsg::MetricGraph g = mlsg::graph_from_json(mlsg::load_json_file(graphFile));
    mlsg::CoreGraph core = mlsg::compute_core(g);
    auto marking = mlsg::build_marking(core);
    if (!marking) {
        std::cerr << "rank 0: the action fixes every point (type II); nothing to translate\n";
        return kExitOk;
    }
    std::vector<mlsg::GroupWord> words;
    if (!word.empty())
        words.push_back(mlsg::parse_word(word, marking->rank()));
    else
        words = mlsg::enumerate_classes(marking->rank(), bound);

    std::size_t maxLen = 1;
    for (const auto& w : words) maxLen = std::max(maxLen, w.size());
    if (radius <= 0) radius = static_cast<int>(maxLen) + 1;
    mlsg::CoverBall ball = mlsg::build_cover_ball(core, *marking, radius);
    if (!dotOut.empty()) mlsg::write_file(dotOut, mlsg::cover_ball_to_dot(ball));

    bool allEqual = true;
    std::cout << "action type: " << mlsg::to_string(mlsg::classify_action(core)) << "\n";
    for (const auto& w : words) {
        mlsg::Rational tl = mlsg::translation_length(ball, w);
        mlsg::Rational spectrumValue = mlsg::mls(core.graph(), *marking, w);
        bool equal = tl == spectrumValue;
        allEqual = allEqual && equal;
        std::cout << mlsg::word_to_string(w) << "\ttranslation=" << tl.str()
                  << "\tmls=" << spectrumValue.str() << "\t" << (equal ? "equal" : "DIFFER") << "\n";
    }
    return allEqual ? kExitOk : kExitNegative;
}

int cmd_roundtrip(std::uint64_t seed, int trials, int rankMin, int rankMax, int maxCoreEdges,
                  bool perturb, const std::string& jsonOut) {
    mlsg::RunConfig cfg;
    cfg.seed = seed;
    cfg.trials = trials;
    cfg.rankMin = rankMin;
    cfg.rankMax = rankMax;
    cfg.maxCoreEdges = maxCoreEdges;
    cfg.perturb = perturb;
    auto t0 = std::chrono::steady_clock::now();
    mlsg::Report report = mlsg::run_roundtrip(cfg);
    auto t1 = std::chrono::steady_clock::now();
    emit(mlsg::dump_json(mlsg::report_to_json(report)), jsonOut);
    std::cerr << "roundtrip: " << report.passCount << "/" << cfg.trials << " passed in "
              << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
              << " ms\n";
    return report.all_passed() ? kExitOk : kExitNegative;
}

int cmd_fuzz(const std::string& file1, const std::string& file2, std::size_t bound) {
    mlsg::MetricGraph g1 = mlsg::graph_from_json(mlsg::load_json_file(file1));
    mlsg::MetricGraph g2 = mlsg::graph_from_json(mlsg::load_json_file(file2));
    mlsg::CoreGraph c1 = mlsg::compute_core(g1);
    mlsg::CoreGraph c2 = mlsg::compute_core(g2);
    if (c1.rank() != c2.rank()) {
        std::cout << "rank mismatch (" << c1.rank() << " vs " << c2.rank()
                  << "): not isomorphic\n";
        return kExitNegative;
    }
    if (c1.rank() == 0) {
        std::cout << "both spaces are trees; spectra are empty and equal\n";
        return kExitOk;
    }
    auto m1 = mlsg::build_marking(c1);
    auto m2 = mlsg::build_marking(c2);
    auto witness = mlsg::find_spectrum_witness(c1.graph(), *m1, c2.graph(), *m2, bound);
    if (witness) {
        std::cout << "witness: " << mlsg::word_to_string(witness->word) << " has lengths "
                  << witness->length1.str() << " vs " << witness->length2.str() << "\n";
        return kExitNegative;
    }
    std::cout << "no witness up to bound " << bound
              << " (bounded agreement; not a proof of isometry)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Marked length spectra of finite metric graphs"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    int rank = 2, vertices = 0, radius = 0, startIndex = -1;
    int trials = 20, rankMin = 2, rankMax = 6, maxCoreEdges = 12;
    std::int64_t maxNum = 20, maxDen = 20;
    std::size_t wordBound = 4;
    bool cyclic = false, perturb = false;
    std::string graphFile, file2, jsonOut, dotOut, word, pathText;
    std::string sourceFile, phiFile, hiddenFile, spectrumFile, dumpQueriesOut;

    auto* gen = app.add_subcommand("gen", "generate a random connected metric graph");
    gen->add_option("--seed", seed);
    gen->add_option("--rank", rank);
    gen->add_option("--vertices", vertices);
    gen->add_option("--max-num", maxNum);
    gen->add_option("--max-den", maxDen);
    gen->add_option("--json", jsonOut);
    gen->add_option("--dot", dotOut);

    auto* core = app.add_subcommand("core", "compute the geodesic-loop core of a graph");
    core->add_option("--graph", graphFile)->required();
    core->add_option("--json", jsonOut);
    core->add_option("--dot", dotOut);

    auto* spectrum = app.add_subcommand("spectrum", "dump the marked length spectrum");
    spectrum->add_option("--graph", graphFile)->required();
    spectrum->add_option("--word-bound", wordBound);
    spectrum->add_option("--word", word, "query a single class instead of dumping");
    spectrum->add_option("--json", jsonOut);

    auto* reduce = app.add_subcommand("reduce", "reduce an edge path or loop");
    reduce->add_option("--graph", graphFile)->required();
    reduce->add_option("--path", pathText)->required();
    reduce->add_option("--start", startIndex, "start vertex (for the empty path)");
    reduce->add_flag("--cyclic", cyclic, "cyclically reduce a closed path");

    auto* reconstruct = app.add_subcommand(
        "reconstruct", "reconstruct the hidden core from spectrum access");
    reconstruct->add_option("--source", sourceFile)->required();
    reconstruct->add_option("--phi", phiFile, "generator substitution JSON");
    reconstruct->add_option("--hidden", hiddenFile, "hidden graph JSON (harness mode)");
    reconstruct->add_option("--spectrum", spectrumFile, "spectrum dump (replay mode)");
    reconstruct->add_option("--json", jsonOut);
    reconstruct->add_option("--dot", dotOut);
    reconstruct->add_option("--dump-queries", dumpQueriesOut,
                            "write every queried class for later replay");

    auto* compare = app.add_subcommand("compare", "exact isometry check between two cores");
    compare->add_option("--graph1", graphFile)->required();
    compare->add_option("--graph2", file2)->required();

    auto* translen = app.add_subcommand("tree-translen",
                                        "translation lengths on the universal cover");
    translen->add_option("--graph", graphFile)->required();
    translen->add_option("--word-bound", wordBound);
    translen->add_option("--word", word, "single word instead of a table");
    translen->add_option("--radius", radius, "cover ball radius (default wordlength+1)");
    translen->add_option("--dot", dotOut);

    auto* roundtrip = app.add_subcommand("roundtrip", "seeded reconstruction round trips");
    roundtrip->add_option("--seed", seed);
    roundtrip->add_option("--trials", trials);
    roundtrip->add_option("--rank-min", rankMin);
    roundtrip->add_option("--rank-max", rankMax);
    roundtrip->add_option("--max-core-edges", maxCoreEdges);
    roundtrip->add_flag("--perturb", perturb, "perturb one hidden edge length by 1/7");
    roundtrip->add_option("--json", jsonOut);

    auto* fuzz = app.add_subcommand("fuzz", "search for a spectrum witness between two graphs");
    fuzz->add_option("--graph1", graphFile)->required();
    fuzz->add_option("--graph2", file2)->required();
    fuzz->add_option("--word-bound", wordBound);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (gen->parsed())
            return cmd_gen(seed, rank, vertices, maxNum, maxDen, jsonOut, dotOut);
        if (core->parsed()) return cmd_core(graphFile, jsonOut, dotOut);
        if (spectrum->parsed()) return cmd_spectrum(graphFile, wordBound, word, jsonOut);
        if (reduce->parsed()) return cmd_reduce(graphFile, pathText, startIndex, cyclic);
        if (reconstruct->parsed()) {
            if (hiddenFile.empty() == spectrumFile.empty())
                throw mlsg::ParseError("reconstruct needs exactly one of --hidden/--spectrum");
            return cmd_reconstruct(sourceFile, phiFile, hiddenFile, spectrumFile, jsonOut,
                                   dotOut, dumpQueriesOut);
        }
        if (compare->parsed()) return cmd_compare(graphFile, file2);
        if (translen->parsed())
            return cmd_tree_translen(graphFile, wordBound, radius, word, dotOut);
        if (roundtrip->parsed())
            return cmd_roundtrip(seed, trials, rankMin, rankMax, maxCoreEdges, perturb, jsonOut);
        if (fuzz->parsed()) return cmd_fuzz(graphFile, file2, wordBound);
    } catch (const mlsg::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const mlsg::WordParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const mlsg::OracleDomainError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const mlsg::RationalParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
