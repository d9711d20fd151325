#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regulab/core.hpp"
#include "regulab/partitions.hpp"
#include "regulab/poly.hpp"
#include "regulab/profile.hpp"
#include "regulab/quasirandomness.hpp"

namespace regulab {

// ------------------------------------------------------------ cut witnesses

struct CutWitness {
    std::vector<uint32_t> rows, cols;  // local indices
    Rat deviation;                     // |e(A,B) - d |A||B|| / (rows * cols)
};

// Exhaustive over the smaller side when it has fewer than exhaustive_side
// vertices (the other side is then optimal in closed form); otherwise
// alternating degree-threshold improvement.
CutWitness find_cut_witness(const BitMatrix& m, WitnessSearch mode, uint32_t exhaustive_side = 16);

// ---------------------------------------------------- graph cylinder engine

// One bipartite layer of a t-partite graph family: adjacency over the
// positions of Y_i x Y_j inside the cylinder being regularized.
struct PairLayer {
    uint32_t i = 0, j = 0;
    BitMatrix adj;
    uint32_t group = 0;  // layers of one input graph share a group
};

// Sum over layers and cylinders of volume-weighted squared layer densities.
Rat layered_index(const VertexCylinder& root, const std::vector<PairLayer>& layers,
                  const std::vector<VertexCylinder>& cylinders);

// Splits root into cylinders until, for every group, the mass of tuples whose
// cylinder makes all of the group's layers alpha-quasirandom is at least
// 1 - alpha/2 (relative to root).
std::vector<VertexCylinder> regularize_cylinder(const VertexCylinder& root, const std::vector<PairLayer>& layers,
                                                const Rat& alpha, const ConstantsProfile& profile,
                                                IterationTrace* trace = nullptr);

VertexCylinderPartition dlr_cylinder_regularity(const std::vector<MultipartiteGraph>& graphs, const Rat& alpha,
                                                const ConstantsProfile& profile, IterationTrace* trace = nullptr);

// Per graph: mass of tuples whose cylinder induces an alpha-quasirandom graph.
std::vector<Rat> dlr_audit(const std::vector<MultipartiteGraph>& graphs, const VertexCylinderPartition& P,
                           const Rat& alpha);

// ------------------------------------------------------ one-cylinder step

// Returns pair partitions hosted on d.xy, d.xz, d.yz with
// q >= d(H|G)^2 + gain and at most cap parts each; RefinementFailure otherwise.
std::array<PairPartition, 3> refine_dense(const DenseChain& d, const Rat& gain, uint32_t cap);
Rat q_dense(const DenseChain& d, const std::array<PairPartition, 3>& parts);

EdgePartition one_cylinder_refine(const Chain& c, const Rat& eta, const ConstantsProfile& profile);

// ------------------------------------------------- 3-graph cylinder engine

struct HyperResult {
    CylinderChainPartition partition;
    IterationTrace trace;
    TupleAudit audit;
    ConstantsProfile profile;  // resolved
};

HyperResult hyper_cylinder_regularity(const ThreeGraph& H, const Rat& eta, const PolyFunction& psi,
                                      const ConstantsProfile& profile);

// ------------------------------------------------- multi-graph Szemeredi

// Mass of ordered pairs in distinct classes whose edge part is
// alpha-quasirandom, over all such pairs.
Rat szemeredi_pair_audit(const ChainPartition& Q, const Rat& alpha);

ChainPartition szemeredi_multi(const ChainPartition& Q, const Rat& alpha, const ConstantsProfile& profile,
                               IterationTrace* trace = nullptr);

// --------------------------------------------------------------- pipelines

// Parts of sizes differing by at most one, remainder on the first parts.
PartiteVertexSet equitable_partition(uint32_t n, uint32_t t);

// The crossing triples of H on the equitable t-partition of its vertices.
ThreeGraph crossing_part(const ThreeGraph& H, const PartiteVertexSet& parts);

struct HomogeneousResult {
    ChainPartition partition;
    HomogeneityAudit audit;
    IterationTrace trace;
    TupleAudit cylinder_audit;
    Rat pair_mass;  // szemeredi audit of the final partition
    uint32_t t = 0;
    ConstantsProfile profile;
};

HomogeneousResult homogeneous_decomposition(const ThreeGraph& H, unsigned vc2_hint, const Rat& eta,
                                            const PolyFunction& psi, const ConstantsProfile& profile);

struct GraphHomogeneousResult {
    std::vector<std::vector<uint32_t>> classes;
    Rat homogeneous_mass;  // unordered distinct pairs in eps-homogeneous class pairs
    uint32_t t = 0;
    std::size_t cylinders = 0;
    IterationTrace trace;
};

// Within-class pairs are judged by the class's internal density.
Rat graph_pair_homogeneity(const Graph& G, const std::vector<std::vector<uint32_t>>& classes, const Rat& eps);

GraphHomogeneousResult graph_homogeneous_decomposition(const Graph& G, const Rat& eps,
                                                       const ConstantsProfile& profile);

struct FpsResult {
    // local ids per side; centers in the order they were picked (ascending scan)
    std::vector<std::vector<uint32_t>> left, right;
    std::vector<uint32_t> left_centers, right_centers;
};

// Threshold eps * n with n the size of the opposite side.
FpsResult fps_packing_partition(const MultipartiteGraph& G, const Rat& eps);

// Every two vertices of a part differ in fewer than 2 eps n neighbours.
bool fps_guarantee_holds(const MultipartiteGraph& G, const FpsResult& r, const Rat& eps);

// ------------------------------------------------------- subset pipelines

// Vertex set: three copies of U; pair graphs: the bipartite double cover of G;
// hyperedges: triples across the copies whose underlying vertices form an
// edge of H.
Chain double_cover_chain(const ThreeGraph& H, const std::vector<uint32_t>& U, const Graph& G);

struct SubsetResult {
    std::vector<uint32_t> U;
    Graph G;                    // on V(H); vertices outside U are isolated
    Rat common_density;         // density of every crossing pair graph
    std::vector<uint32_t> chosen_parts;
    std::size_t cylinder = 0;
    Certificate certificate;    // eta-certificate of the double-cover chain
    bool eta_psi = false;
    Rat relative_density;       // d(H[U,G] | G) on the double cover
};

SubsetResult quasirandom_subset(const ThreeGraph& H, const Rat& eta, const PolyFunction& psi,
                                const ConstantsProfile& profile, uint64_t seed);

struct RodlResult {
    SubsetResult subset;
    std::string flag;  // sparse | dense | witness | neither
    std::optional<std::vector<uint32_t>> witness;
    std::string diagnostic;
};

RodlResult rodl_sparse_dense(const ThreeGraph& H, const ThreeGraph& F, const Rat& eps, const PolyFunction& psi,
                             const ConstantsProfile& profile, uint64_t seed);

}  // namespace regulab
