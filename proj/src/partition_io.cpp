#include "regulab/partition_io.hpp"

#include <algorithm>

#include "regulab/io.hpp"

namespace regulab {

using nlohmann::json;

json ranges_of(const std::vector<uint32_t>& sorted) {
    json out = json::array();
    std::size_t k = 0;
    while (k < sorted.size()) {
        std::size_t e = k + 1;
        while (e < sorted.size() && sorted[e] == sorted[e - 1] + 1) ++e;
        out.push_back({sorted[k], sorted[e - 1] + 1});
        k = e;
    }
    return out;
}

std::vector<uint32_t> from_ranges(const json& j) {
    std::vector<uint32_t> out;
    for (const auto& r : j) {
        uint32_t b = r.at(0).get<uint32_t>(), e = r.at(1).get<uint32_t>();
        if (e < b || (!out.empty() && b < out.back() + 1)) throw ParseError("vertex ranges must be ascending");
        for (uint32_t v = b; v < e; ++v) out.push_back(v);
    }
    return out;
}

json to_json(const PartiteVertexSet& vs) {
    json out = json::array();
    for (const auto& p : vs.parts()) out.push_back({{"name", p.name}, {"size", p.size}});
    return out;
}

PartiteVertexSet vertex_set_from_json(const json& j) {
    std::vector<std::pair<std::string, uint32_t>> parts;
    for (const auto& p : j) parts.emplace_back(p.at("name").get<std::string>(), p.at("size").get<uint32_t>());
    return PartiteVertexSet(parts);
}

json to_json(const PairPartition& p) {
    json parts = json::array();
    const std::size_t cells = p.label.size();
    for (uint32_t a = 0; a < p.parts; ++a) {
        std::vector<uint8_t> bytes((cells + 7) / 8, 0);
        for (std::size_t k = 0; k < cells; ++k)
            if (p.label[k] == int32_t(a)) bytes[k >> 3] |= uint8_t(1u << (k & 7));
        parts.push_back(base64_encode(bytes));
    }
    return {{"rows", p.rows}, {"cols", p.cols}, {"parts", parts}};
}

PairPartition pair_partition_from_json(const json& j) {
    PairPartition p;
    p.rows = j.at("rows").get<uint32_t>();
    p.cols = j.at("cols").get<uint32_t>();
    const std::size_t cells = std::size_t(p.rows) * p.cols;
    p.label.assign(cells, -1);
    const auto& parts = j.at("parts");
    p.parts = static_cast<uint32_t>(parts.size());
    for (uint32_t a = 0; a < p.parts; ++a) {
        auto bytes = base64_decode(parts[a].get<std::string>());
        if (bytes.size() != (cells + 7) / 8) throw ParseError("edge part bitmap has the wrong length");
        for (std::size_t k = 0; k < cells; ++k) {
            if (!(bytes[k >> 3] >> (k & 7) & 1u)) continue;
            if (p.label[k] >= 0) throw ValidationError("edge parts overlap");
            p.label[k] = int32_t(a);
        }
    }
    return p;
}

json to_json(const ChainPartition& Q) {
    json classes = json::array();
    for (const auto& c : Q.classes) {
        // Edge bitmaps index class members by position, so the order must survive the range encoding.
        if (!std::is_sorted(c.begin(), c.end())) throw ValidationError("vertex classes must be ascending to serialize");
        classes.push_back(ranges_of(c));
    }
    json edges = json::array();
    for (uint32_t p = 0; p < Q.size(); ++p)
        for (uint32_t q = p + 1; q < Q.size(); ++q) {
            json e = to_json(Q.edge(p, q));
            e["classes"] = {p, q};
            edges.push_back(e);
        }
    return {{"kind", "chain_partition"}, {"vertices", to_json(Q.vertices)}, {"classes", classes}, {"edges", edges}};
}

ChainPartition chain_partition_from_json(const json& j) {
    if (j.at("kind") != "chain_partition") throw ParseError("not a chain partition");
    std::vector<std::vector<uint32_t>> classes;
    for (const auto& c : j.at("classes")) classes.push_back(from_ranges(c));
    ChainPartition Q = ChainPartition::from_classes(vertex_set_from_json(j.at("vertices")), std::move(classes));
    const auto& edges = j.at("edges");
    if (edges.size() != Q.edges.size()) throw ValidationError("edge partition count mismatch");
    for (const auto& e : edges) {
        uint32_t p = e.at("classes").at(0).get<uint32_t>(), q = e.at("classes").at(1).get<uint32_t>();
        if (p >= q || q >= Q.size()) throw ValidationError("bad class pair in edge partition");
        Q.edge(p, q) = pair_partition_from_json(e);
    }
    Q.validate();
    return Q;
}

json to_json(const CylinderChainPartition& P) {
    json cyl = json::array();
    for (std::size_t c = 0; c < P.vertex.cylinders.size(); ++c) {
        json sets = json::array();
        for (const auto& s : P.vertex.cylinders[c].sets) sets.push_back(ranges_of(s));
        json pairs = json::array();
        for (const auto& pp : P.edges[c].pairs) pairs.push_back(to_json(pp));
        cyl.push_back({{"sets", sets}, {"pairs", pairs}});
    }
    return {{"kind", "cylinder_chain_partition"}, {"vertices", to_json(P.vertex.vertices)}, {"cylinders", cyl}};
}

CylinderChainPartition cylinder_partition_from_json(const json& j) {
    if (j.at("kind") != "cylinder_chain_partition") throw ParseError("not a cylinder chain partition");
    CylinderChainPartition P;
    P.vertex.vertices = vertex_set_from_json(j.at("vertices"));
    const uint32_t t = P.vertex.vertices.t();
    for (const auto& c : j.at("cylinders")) {
        VertexCylinder Y;
        for (const auto& s : c.at("sets")) Y.sets.push_back(from_ranges(s));
        if (Y.t() != t) throw ValidationError("cylinder has the wrong number of parts");
        EdgePartition E;
        for (const auto& s : Y.sets) E.sizes.push_back(static_cast<uint32_t>(s.size()));
        for (const auto& pp : c.at("pairs")) E.pairs.push_back(pair_partition_from_json(pp));
        if (E.pairs.size() != std::size_t(t) * (t - 1) / 2) throw ValidationError("cylinder has the wrong pair count");
        P.vertex.cylinders.push_back(std::move(Y));
        P.edges.push_back(std::move(E));
    }
    P.validate();
    return P;
}

}  // namespace regulab
