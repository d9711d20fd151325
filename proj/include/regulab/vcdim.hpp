#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regulab/core.hpp"

namespace regulab {

// Members are bitmasks over a universe of at most 32 elements.
struct SetSystem {
    uint32_t n = 0;
    std::vector<uint32_t> members;

    // {N(v) : v in V(G)} over the universe V(G).
    static SetSystem neighborhoods(const Graph& g);
    // Neighbourhoods of the right part, as subsets of the left part's local ids.
    static SetSystem right_neighborhoods(const MultipartiteGraph& g);
    void validate() const;
};

struct VcWitness {
    std::vector<uint32_t> shattered;  // ascending elements of S
    // realizer[m] = index of a member whose trace on S is the pattern m
    // (bit k of m <-> shattered[k]).
    std::vector<uint32_t> realizer;
};

struct VcResult {
    unsigned d = 0;
    VcWitness witness;
};

constexpr uint32_t kVcMaxUniverse = 24;
constexpr uint32_t kVc2MaxVertices = 20;

VcResult vc_dimension(const SetSystem& s, unsigned cap_d = 32, uint32_t max_n = kVcMaxUniverse);
bool verify_shattering(const SetSystem& s, const VcWitness& w);

struct Vc2Witness {
    std::vector<uint32_t> A, B;  // global ids, disjoint
    // realizer[m] = vertex outside A and B whose link on A x B is the pattern m
    // (bit a * d + b of m <-> (A[a], B[b])).
    std::vector<uint32_t> realizer;
};

struct Vc2Result {
    unsigned d = 0;
    Vc2Witness witness;
};

// A and B range over all disjoint placements, parts ignored.
Vc2Result vc2_dimension(const ThreeGraph& H, unsigned cap_d = 3, uint32_t max_n = kVc2MaxVertices);
bool verify_vc2(const ThreeGraph& H, const Vc2Witness& w);

// Image of each pattern vertex (indexed by global id of the pattern).
using Embedding = std::vector<uint32_t>;

// F bipartite (two parts): images of the two parts are disjoint and every
// cross pair is an edge of G iff it is one of F. |V(F)| <= 10.
std::optional<Embedding> bipartitely_induced(const MultipartiteGraph& F, const Graph& G);
// V tripartite: images of the three parts are disjoint and every crossing
// triple is an edge of H iff it is one of V. |V(V)| <= 9.
std::optional<Embedding> tripartitely_induced(const ThreeGraph& V, const ThreeGraph& H);
// Injective map with every triple constrained. |V(F)| <= 8.
std::optional<Embedding> induced_copy_search(const ThreeGraph& F, const ThreeGraph& H);

bool verify_bipartite_embedding(const MultipartiteGraph& F, const Graph& G, const Embedding& e);
bool verify_tripartite_embedding(const ThreeGraph& V, const ThreeGraph& H, const Embedding& e);
bool verify_induced_copy(const ThreeGraph& F, const ThreeGraph& H, const Embedding& e);

}  // namespace regulab
