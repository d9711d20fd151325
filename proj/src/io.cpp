#include "regulab/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

namespace regulab {

namespace {

struct Header {
    std::vector<std::pair<std::string, uint32_t>> parts;
};

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
}

uint32_t parse_index(const std::string& s, std::size_t line) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("bad vertex index '" + s + "'", line);
    try {
        unsigned long v = std::stoul(s);
        if (v > 0xffffffffUL) throw ParseError("vertex index too large", line);
        return static_cast<uint32_t>(v);
    } catch (const std::out_of_range&) {
        throw ParseError("vertex index too large", line);
    }
}

// Reads the whole file; calls on_record(tokens, line) for every non-part line.
template <class F>
PartiteVertexSet parse(std::istream& in, char record, std::size_t arity, F&& on_record,
                       std::vector<std::pair<std::vector<uint32_t>, std::size_t>>& records) {
    Header h;
    std::unordered_set<std::string> names;
    std::string line;
    std::size_t lineno = 0;
    bool body = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok[0] == "part") {
            if (body) throw ParseError("part declaration after records", lineno);
            if (tok.size() != 3) throw ParseError("expected 'part <name> <size>'", lineno);
            if (!names.insert(tok[1]).second) throw ParseError("duplicate part name '" + tok[1] + "'", lineno);
            h.parts.emplace_back(tok[1], parse_index(tok[2], lineno));
        } else if (tok[0].size() == 1 && tok[0][0] == record) {
            body = true;
            if (tok.size() != arity + 1)
                throw ParseError(std::string("expected ") + record + " followed by " + std::to_string(arity) +
                                     " indices",
                                 lineno);
            std::vector<uint32_t> ids;
            for (std::size_t k = 1; k <= arity; ++k) ids.push_back(parse_index(tok[k], lineno));
            records.emplace_back(std::move(ids), lineno);
        } else {
            throw ParseError("unknown record '" + tok[0] + "'", lineno);
        }
    }
    if (h.parts.empty()) throw ParseError("no part declarations", lineno);
    PartiteVertexSet vs(h.parts);
    for (auto& [ids, ln] : records) {
        for (auto v : ids)
            if (v >= vs.n())
                throw ParseError("vertex " + std::to_string(v) + " out of range (n = " + std::to_string(vs.n()) + ")",
                                 ln);
        on_record(vs, ids, ln);
    }
    return vs;
}

void write_header(std::ostream& out, const PartiteVertexSet& vs) {
    for (const auto& p : vs.parts()) out << "part " << p.name << ' ' << p.size << '\n';
}

}  // namespace

Graph read_graph(std::istream& in) {
    std::vector<std::pair<std::vector<uint32_t>, std::size_t>> recs;
    auto vs = parse(in, 'e', 2, [](const PartiteVertexSet&, const std::vector<uint32_t>&, std::size_t) {}, recs);
    Graph g(vs);
    for (auto& [ids, ln] : recs) {
        try {
            g.add_edge(ids[0], ids[1]);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(ln) + ": " + e.what());
        }
    }
    return g;
}

ThreeGraph read_three_graph(std::istream& in) {
    std::vector<std::pair<std::vector<uint32_t>, std::size_t>> recs;
    auto vs = parse(in, 't', 3, [](const PartiteVertexSet&, const std::vector<uint32_t>&, std::size_t) {}, recs);
    ThreeGraph h(vs, vs.t() >= 2);
    for (auto& [ids, ln] : recs) {
        try {
            h.add(ids[0], ids[1], ids[2]);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(ln) + ": " + e.what());
        }
    }
    return h;
}

void write_graph(std::ostream& out, const Graph& g) {
    write_header(out, g.vertices());
    for (auto [u, v] : g.edges()) out << "e " << u << ' ' << v << '\n';
}

void write_graph(std::ostream& out, const MultipartiteGraph& g) {
    write_header(out, g.vertices());
    for (auto [u, v] : g.edges()) out << "e " << u << ' ' << v << '\n';
}

void write_three_graph(std::ostream& out, const ThreeGraph& h) {
    write_header(out, h.vertices());
    for (const auto& tr : h.triples()) out << "t " << tr.a << ' ' << tr.b << ' ' << tr.c << '\n';
}

static std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return in;
}

static std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    return out;
}

Graph load_graph(const std::string& path) {
    auto in = open_in(path);
    return read_graph(in);
}

ThreeGraph load_three_graph(const std::string& path) {
    auto in = open_in(path);
    return read_three_graph(in);
}

void save_graph(const std::string& path, const Graph& g) {
    auto out = open_out(path);
    write_graph(out, g);
}

void save_three_graph(const std::string& path, const ThreeGraph& h) {
    auto out = open_out(path);
    write_three_graph(out, h);
}

Graph as_graph(const MultipartiteGraph& g) {
    Graph out(g.vertices());
    for (auto [u, v] : g.edges()) out.add_edge(u, v);
    return out;
}

std::string content_hash(const std::string& text) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream ss;
    for (unsigned k = 0; k < len; ++k) ss << std::hex << std::setw(2) << std::setfill('0') << int(md[k]);
    return ss.str();
}

std::string canonical_text(const Graph& g) {
    std::ostringstream ss;
    write_graph(ss, g);
    return ss.str();
}

std::string canonical_text(const ThreeGraph& h) {
    std::ostringstream ss;
    write_three_graph(ss, h);
    return ss.str();
}

nlohmann::json to_json(const DecompositionReport& r) {
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["command"] = r.command;
    j["input_hash"] = r.input_hash;
    j["profile"] = r.profile;
    j["seed"] = r.seed;
    j["trace"] = r.trace;
    j["audit"] = r.audit;
    j["part_counts"] = r.part_counts;
    if (!r.extra.empty()) j["extra"] = r.extra;
    j["runtime_ms"] = r.runtime_ms;
    return j;
}

DecompositionReport report_from_json(const nlohmann::json& j) {
    if (!j.contains("schema") || j["schema"] != kReportSchema) throw ParseError("report schema mismatch");
    DecompositionReport r;
    try {
        r.command = j.at("command").get<std::string>();
        r.input_hash = j.at("input_hash").get<std::string>();
        r.profile = j.at("profile");
        r.seed = j.at("seed").get<uint64_t>();
        r.trace = j.at("trace");
        r.audit = j.at("audit");
        r.part_counts = j.at("part_counts");
        if (j.contains("extra")) r.extra = j["extra"];
        r.runtime_ms = j.at("runtime_ms").get<long long>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed report: ") + e.what());
    }
    return r;
}

void save_report(const std::string& path, const DecompositionReport& r) {
    auto out = open_out(path);
    out << to_json(r).dump(2) << '\n';
}

DecompositionReport load_report(const std::string& path) {
    auto in = open_in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed report: ") + e.what());
    }
    return report_from_json(j);
}

std::string base64_encode(const std::vector<uint8_t>& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<uint8_t> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0) throw ParseError("base64 length not a multiple of 4");
    std::vector<uint8_t> out(3 * text.size() / 4);
    int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
    if (n < 0) throw ParseError("bad base64");
    std::size_t pad = 0;
    if (!text.empty() && text.back() == '=') ++pad;
    if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

}  // namespace regulab
