#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "regulab/core.hpp"

namespace regulab {

// Text formats:
//   part <name> <size>        (declaration order fixes global indices)
//   e <u> <v>                 graph edge, global 0-based ids
//   t <u> <v> <w>             3-graph triple
// '#' starts a comment. Files with t >= 2 parts are read as partite, so
// triples must meet three parts; single-part files hold general 3-graphs.

Graph read_graph(std::istream& in);
ThreeGraph read_three_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);
void write_graph(std::ostream& out, const MultipartiteGraph& g);
void write_three_graph(std::ostream& out, const ThreeGraph& h);

Graph load_graph(const std::string& path);
ThreeGraph load_three_graph(const std::string& path);
void save_graph(const std::string& path, const Graph& g);
void save_three_graph(const std::string& path, const ThreeGraph& h);

// Converts between the two in-memory graph types (same vertex set).
Graph as_graph(const MultipartiteGraph& g);

// SHA-256 (hex) of the canonical text form.
std::string content_hash(const std::string& canonical_text);
std::string canonical_text(const Graph& g);
std::string canonical_text(const ThreeGraph& h);

struct DecompositionReport {
    std::string command;
    std::string input_hash;
    nlohmann::json profile = nlohmann::json::object();
    uint64_t seed = 0;
    nlohmann::json trace = nlohmann::json::array();
    nlohmann::json audit = nlohmann::json::object();
    nlohmann::json part_counts = nlohmann::json::object();
    nlohmann::json extra = nlohmann::json::object();
    long long runtime_ms = 0;

    bool operator==(const DecompositionReport&) const = default;
};

constexpr int kReportSchema = 1;

nlohmann::json to_json(const DecompositionReport& r);
DecompositionReport report_from_json(const nlohmann::json& j);
void save_report(const std::string& path, const DecompositionReport& r);
DecompositionReport load_report(const std::string& path);

std::string base64_encode(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> base64_decode(const std::string& text);

}  // namespace regulab
