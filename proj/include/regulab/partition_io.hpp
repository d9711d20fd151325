#pragma once

#include <json.hpp>

#include "regulab/partitions.hpp"

namespace regulab {

// Vertex lists are stored as [begin, end) ranges; each edge part is a
// row-major bitmap over its host, packed LSB-first and base64-encoded.
nlohmann::json to_json(const PartiteVertexSet& vs);
PartiteVertexSet vertex_set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PairPartition& p);
PairPartition pair_partition_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ChainPartition& Q);
ChainPartition chain_partition_from_json(const nlohmann::json& j);  // validated

nlohmann::json to_json(const CylinderChainPartition& P);
CylinderChainPartition cylinder_partition_from_json(const nlohmann::json& j);  // validated

nlohmann::json ranges_of(const std::vector<uint32_t>& sorted);
std::vector<uint32_t> from_ranges(const nlohmann::json& j);

}  // namespace regulab
