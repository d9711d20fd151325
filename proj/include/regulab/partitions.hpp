#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regulab/core.hpp"
#include "regulab/poly.hpp"
#include "regulab/quasirandomness.hpp"

namespace regulab {

// Partition of a bipartite host (rows x cols). label -1 marks cells outside the
// host; parts are labelled 0..parts-1.
struct PairPartition {
    uint32_t rows = 0, cols = 0;
    std::vector<int32_t> label;
    uint32_t parts = 0;

    int32_t at(uint32_t r, uint32_t c) const { return label[std::size_t(r) * cols + c]; }
    int32_t& at(uint32_t r, uint32_t c) { return label[std::size_t(r) * cols + c]; }

    // One part over the host cells (complete host when null).
    static PairPartition trivial(uint32_t rows, uint32_t cols, const BitMatrix* host = nullptr);
    BitMatrix host() const;
    BitMatrix part_matrix(int32_t part) const;
    std::size_t part_size(int32_t part) const;
    // Relabels parts by first appearance in row-major order and drops empty ones.
    void compact();
    bool operator==(const PairPartition&) const = default;
};

PairPartition restrict_pair(const PairPartition& p, const std::vector<uint32_t>& rows,
                            const std::vector<uint32_t>& cols);

// Per-pair partitions of a t-partite host, indexed by pair_index(i, j, t).
struct EdgePartition {
    std::vector<uint32_t> sizes;
    std::vector<PairPartition> pairs;

    uint32_t t() const { return static_cast<uint32_t>(sizes.size()); }
    const PairPartition& pair(uint32_t i, uint32_t j) const { return pairs[pair_index(i, j, t())]; }
    PairPartition& pair(uint32_t i, uint32_t j) { return pairs[pair_index(i, j, t())]; }
    // |P_E|: largest number of parts over the pairs.
    uint32_t max_parts() const;

    static EdgePartition trivial(const std::vector<uint32_t>& sizes);
    static EdgePartition trivial(const MultipartiteGraph& host);
    bool operator==(const EdgePartition&) const = default;
};

struct VertexCylinder {
    std::vector<std::vector<uint32_t>> sets;  // global ids, ascending, one list per part

    uint32_t t() const { return static_cast<uint32_t>(sets.size()); }
    Int volume() const;
    bool operator==(const VertexCylinder&) const = default;
};

struct VertexCylinderPartition {
    PartiteVertexSet vertices;
    std::vector<VertexCylinder> cylinders;

    static VertexCylinderPartition trivial(const PartiteVertexSet& vs);
    // Throws ValidationError unless the cylinders tile X_1 x ... x X_t.
    void validate() const;
};

struct CylinderChainPartition {
    VertexCylinderPartition vertex;
    std::vector<EdgePartition> edges;  // one per cylinder, complete hosts

    static CylinderChainPartition trivial(const PartiteVertexSet& vs);
    void validate() const;
    uint32_t max_edge_parts() const;
};

// Genuine vertex partition plus edge partitions of the complete bipartite
// graphs between distinct classes (indexed by pair_index over classes).
struct ChainPartition {
    PartiteVertexSet vertices;
    std::vector<std::vector<uint32_t>> classes;
    std::vector<uint32_t> class_of;
    std::vector<PairPartition> edges;

    uint32_t size() const { return static_cast<uint32_t>(classes.size()); }
    const PairPartition& edge(uint32_t p, uint32_t q) const { return edges[pair_index(p, q, size())]; }
    PairPartition& edge(uint32_t p, uint32_t q) { return edges[pair_index(p, q, size())]; }
    uint32_t max_edge_parts() const;

    // Classes = the given vertex groups; trivial edge partitions.
    static ChainPartition from_classes(const PartiteVertexSet& vs, std::vector<std::vector<uint32_t>> classes);
    void validate() const;
};

// Triangle and hyperedge counts of every non-empty subchain, keyed by the
// label triple (a, b, c) of the xy, xz, yz pairs.
struct SubchainStats {
    int32_t a, b, c;
    uint64_t triangles;
    uint64_t hyperedges;
};

// Subchains of H on verts[0] x verts[1] x verts[2] cut out by the three pair
// partitions (their host cells define the tripartite graph).
std::vector<SubchainStats> subchain_stats(const ThreeGraph& H, const std::array<const std::vector<uint32_t>*, 3>& verts,
                                          const std::array<const PairPartition*, 3>& pe, Mode mode = Mode::fast);
Rat q_from_stats(const std::vector<SubchainStats>& stats);

Rat q_local(const ThreeGraph& H, const std::array<const std::vector<uint32_t>*, 3>& verts,
            const std::array<const PairPartition*, 3>& pe, Mode mode = Mode::fast);
Rat q_edge_partition(const Chain& c, const EdgePartition& pe, Mode mode = Mode::fast);
Rat q_cylinder(const ThreeGraph& H, const VertexCylinder& Y, const EdgePartition& pe, Mode mode = Mode::fast);
Rat q_partition(const ThreeGraph& H, const CylinderChainPartition& P, Mode mode = Mode::fast);

bool refines(const PairPartition& coarse, const PairPartition& fine);
bool refines(const EdgePartition& coarse, const EdgePartition& fine);
bool refines(const VertexCylinderPartition& coarse, const VertexCylinderPartition& fine);
bool refines(const CylinderChainPartition& coarse, const CylinderChainPartition& fine);

// For each fine cylinder, the coarse cylinder containing it (-1 if none).
std::vector<int> containing_cylinders(const VertexCylinderPartition& coarse, const VertexCylinderPartition& fine);

PairPartition common_refinement(const std::vector<const PairPartition*>& parts);
EdgePartition common_refinement(const std::vector<EdgePartition>& parts);

ChainPartition venn_diagram(const CylinderChainPartition& P);

struct HomogeneityAudit {
    Rat gamma;
    Rat homogeneous_mass;           // ordered triples of V^3; same-class triples fail
    Rat crossing_homogeneous_mass;  // among triples meeting three distinct classes
    Rat crossing_mass;              // share of V^3 meeting three distinct classes
    Rat quasirandom_mass;           // located graph is psi(delta)-quasirandom
    Rat degenerate_mass;
    Rat sparse_mass;                // located graph has a pair below sparse_threshold
    std::string convention = "ordered-triples";
};

HomogeneityAudit homogeneity_audit(const ThreeGraph& H, const ChainPartition& Q, const Rat& gamma,
                                   const PolyFunction& psi, const Rat& sparse_threshold = Rat(0));

struct TupleAudit {
    Rat good_mass;         // located chain passes every requested test
    Rat homogeneous_mass;  // every tripartite subchain gamma-homogeneous
    Rat eta_mass;          // every tripartite subchain eta-quasirandom
    Rat psi_mass;          // located graph psi(delta)-quasirandom
    Rat dense_mass;        // delta(Z) >= delta_floor
    bool exhaustive = true;
    uint64_t tuples = 0;
};

struct TupleAuditOptions {
    std::optional<Rat> eta;    // require eta-quasirandom subchains
    std::optional<Rat> gamma;  // require gamma-homogeneous subchains
    bool require_psi = true;
    Rat delta_floor{0};
    uint64_t exhaustive_limit = 1000000;
    uint64_t samples = 10000;
    uint64_t seed = 1;
};

// Measures t-tuples of X_1 x ... x X_t by the chain P locates for them.
TupleAudit tuple_audit(const ThreeGraph& H, const CylinderChainPartition& P, const PolyFunction& psi,
                       const TupleAuditOptions& opt);

// (eta, psi)-audit of H relative to P; passes when good mass >= 1 - eta.
TupleAudit eta_psi_audit(const ThreeGraph& H, const CylinderChainPartition& P, const Rat& eta, const PolyFunction& psi);

HomogeneityAudit homogeneity_audit(const ThreeGraph& H, const CylinderChainPartition& P, const Rat& gamma,
                                   const PolyFunction& psi);

struct MarkovResult {
    Rat mass_bad;
    Rat gamma;
    std::optional<Rat> bound;  // sqrt(gamma) when rational
    bool within_bound = false;  // mass_bad < sqrt(gamma), decided exactly
};

// vertex_classes[p]: partition of part p's local ids into groups; pair
// partitions are hosted on the chain's pair graphs.
MarkovResult markov_split_check(const Chain& c, const std::array<std::vector<std::vector<uint32_t>>, 3>& vertex_classes,
                                const std::array<PairPartition, 3>& pair_parts, const Rat& gamma);

}  // namespace regulab
