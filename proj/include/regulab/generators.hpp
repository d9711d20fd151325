#pragma once

#include <cstdint>
#include <vector>

#include "regulab/core.hpp"

namespace regulab {

// splitmix64 (Steele, Lea, Flood 2014):
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// Derived draws:
//   coin()      top bit of next()
//   below(n)    rejection: draw u until u >= (2^64 - n) % n, return u % n
//   bernoulli   next() < floor(p * 2^64), with p = 1 always true
// Every generator consumes draws in the order documented next to it.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}
    uint64_t next();
    bool coin() { return next() >> 63; }
    uint64_t below(uint64_t n);

private:
    uint64_t state_;
};

class Bernoulli {
public:
    explicit Bernoulli(const Rat& p);
    bool operator()(SplitMix64& rng) const;

private:
    unsigned __int128 threshold_;  // floor(p * 2^64), up to 2^64
};

// Seeded Fisher-Yates, i from n-1 down to 1 swapping with below(i + 1).
void shuffle(std::vector<uint32_t>& v, SplitMix64& rng);

// Parts A = [d], B = [d], C = subsets of [d]^2 encoded as bitmasks over
// a * d + b; (a, b, S) is an edge iff bit (a, b) of S is set. d <= 3.
ThreeGraph make_vd(unsigned d);

// Parts A = [d], B = subsets of [d]; a ~ S iff a in S. d <= 16.
MultipartiteGraph make_fd(unsigned d);

// Parts of G plus an apex part C of size n; (a, b, c) is an edge iff ab in G.
ThreeGraph cone_hypergraph(const MultipartiteGraph& g, uint32_t n);

// For c = 0..nC-1: X_c by one coin per a in A, then Y_c by one coin per b.
ThreeGraph random_link_hypergraph(uint32_t nA, uint32_t nB, uint32_t nC, uint64_t seed);

// One coin per pair i < j (lexicographic): true orients i -> j. Single part.
ThreeGraph random_tournament_3graph(uint32_t n, uint64_t seed);

// One Bernoulli draw per crossing triple in lexicographic order.
ThreeGraph random_partite_3graph(const std::vector<uint32_t>& sizes, const Rat& p, uint64_t seed);

// One Bernoulli draw per pair (a, b), row-major.
MultipartiteGraph random_bipartite(uint32_t nA, uint32_t nB, const Rat& p, uint64_t seed);

// One Bernoulli draw per crossing pair, pairs of parts in lexicographic order.
MultipartiteGraph random_multipartite(const std::vector<uint32_t>& sizes, const Rat& p, uint64_t seed);

// One Bernoulli draw per pair u < v.
Graph random_graph(uint32_t n, const Rat& p, uint64_t seed);

// Edge (i, j) iff i <= j on [n] x [n].
MultipartiteGraph half_graph(uint32_t n);

// Chain on the complete tripartite graph with H = {xyz : xy in E1}, E1 drawn
// with density 1/2, then each triple flipped with probability `noise`.
ThreeGraph link_structured_3graph(uint32_t n, const Rat& noise, uint64_t seed);

}  // namespace regulab
