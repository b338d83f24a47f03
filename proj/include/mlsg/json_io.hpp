#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mlsg/core.hpp"
#include "mlsg/reconstruct.hpp"
#include "mlsg/word.hpp"

namespace mlsg {

using Json = nlohmann::ordered_json;

/// Input rejection with enough position/context to locate the problem.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(what + ": " + e.what());  // carries byte position
    }
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), "'" + path + "'");
}

/// Graph wire format:
///   {"vertices": N, "edges": [{"a": i, "b": j, "len": "p/q"}, ...]}
/// Lengths are "p/q" or decimal strings, stored exactly.
inline MetricGraph graph_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("graph: expected an object");
    if (!j.contains("vertices") || !j["vertices"].is_number_unsigned())
        throw ParseError("graph: missing non-negative integer field 'vertices'");
    if (!j.contains("edges") || !j["edges"].is_array())
        throw ParseError("graph: missing array field 'edges'");
    std::size_t vertices = j["vertices"].get<std::size_t>();
    std::vector<EdgeRecord> edges;
    std::size_t idx = 0;
    for (const Json& je : j["edges"]) {
        std::string at = "graph: edges[" + std::to_string(idx) + "]";
        if (!je.is_object() || !je.contains("a") || !je.contains("b") || !je.contains("len"))
            throw ParseError(at + ": expected {a, b, len}");
        if (!je["a"].is_number_unsigned() || !je["b"].is_number_unsigned())
            throw ParseError(at + ": endpoints must be non-negative integers");
        EdgeRecord rec;
        rec.a = je["a"].get<VertexId>();
        rec.b = je["b"].get<VertexId>();
        if (rec.a >= vertices || rec.b >= vertices)
            throw ParseError(at + ": endpoint out of range");
        if (!je["len"].is_string()) throw ParseError(at + ": len must be a string");
        try {
            rec.length = Rational::parse(je["len"].get<std::string>());
        } catch (const std::exception& e) {
            throw ParseError(at + ": " + e.what());
        }
        if (!rec.length.is_positive()) throw ParseError(at + ": length must be positive");
        edges.push_back(rec);
        ++idx;
    }
    try {
        return MetricGraph(vertices, edges);
    } catch (const GraphStructureError& e) {
        throw ParseError(std::string("graph: ") + e.what());
    }
}

inline Json graph_to_json(const MetricGraph& g) {
    Json j;
    j["vertices"] = g.vertex_count();
    j["edges"] = Json::array();
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        Json je;
        je["a"] = g.edge(e).a;
        je["b"] = g.edge(e).b;
        je["len"] = g.length(e).str();
        j["edges"].push_back(je);
    }
    return j;
}

inline Json core_to_json(const CoreGraph& c) {
    Json j;
    j["rank"] = c.rank();
    j["graph"] = graph_to_json(c.graph());
    j["branch_points"] = Json::array();
    for (VertexId v : c.branch_points()) j["branch_points"].push_back(v);
    Json vmap = Json::array();
    for (VertexId v = 0; v < c.graph().vertex_count(); ++v) vmap.push_back(c.host_vertex(v));
    j["host_vertices"] = vmap;
    return j;
}

/// Substitution format: {"g1": "g2 g1'", "g2": "g1", ...}; every generator
/// of the caller's rank must be present.
inline GroupWordSubstitution substitution_from_json(const Json& j, std::size_t callerRank,
                                                    std::size_t hiddenRank) {
    if (!j.is_object()) throw ParseError("phi: expected an object of generator images");
    GroupWordSubstitution phi;
    for (std::size_t i = 1; i <= callerRank; ++i) {
        std::string key = "g" + std::to_string(i);
        if (!j.contains(key)) throw ParseError("phi: missing image for " + key);
        if (!j[key].is_string()) throw ParseError("phi: image of " + key + " must be a string");
        try {
            phi.images.push_back(parse_word(j[key].get<std::string>(), hiddenRank));
        } catch (const WordParseError& e) {
            throw ParseError("phi." + key + ": " + e.what());
        }
    }
    return phi;
}

inline const char* check_kind_name(CheckKind k) {
    switch (k) {
        case CheckKind::LengthRecovery: return "length_recovery";
        case CheckKind::AlphaBeta: return "alpha_beta";
        case CheckKind::Incidence: return "incidence";
        case CheckKind::CircleLength: return "circle_length";
    }
    return "?";
}

inline Json certificate_entry_to_json(const CertificateEntry& e) {
    Json j;
    j["kind"] = check_kind_name(e.kind);
    if (e.segment != kNoEdge) j["segment"] = e.segment;
    if (e.segment2 != kNoEdge) j["segment2"] = e.segment2;
    if (e.vertex != kNoVertex) j["vertex"] = e.vertex;
    j["words"] = Json::array();
    for (const GroupWord& w : e.words) j["words"].push_back(word_to_string(w));
    j["observed"] = Json::array();
    for (const Rational& r : e.observed) j["observed"].push_back(r.str());
    j["expected"] = e.expected.str();
    j["actual"] = e.actual.str();
    j["pass"] = e.pass;
    j["matches_source"] = e.matchesSource;
    if (e.kind == CheckKind::Incidence) j["closed_form"] = e.closedForm.str();
    return j;
}

inline Json reconstruction_to_json(const ReconstructionResult& r) {
    Json j;
    j["core"] = core_to_json(r.reconstructedCore);
    Json vm = Json::array();
    for (VertexId v : r.vertexMap) vm.push_back(v);
    j["vertex_map"] = vm;
    j["certificate"] = Json::array();
    for (const CertificateEntry& e : r.certificate)
        j["certificate"].push_back(certificate_entry_to_json(e));
    return j;
}

/// Spectrum dump: [{"word": "g1 g2'", "length": "p/q"}, ...], keyed by
/// canonical class words.
inline Json spectrum_dump_to_json(const std::vector<std::pair<GroupWord, Rational>>& classes) {
    Json j = Json::array();
    for (const auto& [w, len] : classes) {
        Json je;
        je["word"] = word_to_string(w);
        je["length"] = len.str();
        j.push_back(je);
    }
    return j;
}

inline std::map<std::string, Rational> spectrum_dump_from_json(const Json& j, std::size_t rank) {
    if (!j.is_array()) throw ParseError("spectrum dump: expected an array");
    std::map<std::string, Rational> table;
    std::size_t idx = 0;
    for (const Json& je : j) {
        std::string at = "spectrum dump[" + std::to_string(idx) + "]";
        if (!je.is_object() || !je.contains("word") || !je.contains("length"))
            throw ParseError(at + ": expected {word, length}");
        if (!je["word"].is_string() || !je["length"].is_string())
            throw ParseError(at + ": word and length must be strings");
        try {
            GroupWord w = parse_word(je["word"].get<std::string>(), rank);
            table[word_to_string(canonical_class_key(w))] =
                Rational::parse(je["length"].get<std::string>());
        } catch (const std::exception& e) {
            throw ParseError(at + ": " + e.what());
        }
        ++idx;
    }
    return table;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
    out << content;
}

}  // namespace mlsg
