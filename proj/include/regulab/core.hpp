#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "regulab/bitset.hpp"
#include "regulab/errors.hpp"
#include "regulab/rational.hpp"

namespace regulab {

struct Part {
    std::string name;
    uint32_t begin = 0;
    uint32_t size = 0;
    bool operator==(const Part&) const = default;
};

// Parts occupy contiguous global index ranges in declaration order.
class PartiteVertexSet {
public:
    PartiteVertexSet() = default;
    explicit PartiteVertexSet(const std::vector<std::pair<std::string, uint32_t>>& parts);
    static PartiteVertexSet sized(const std::vector<uint32_t>& sizes);

    uint32_t t() const { return static_cast<uint32_t>(parts_.size()); }
    uint32_t n() const { return n_; }
    const Part& part(uint32_t i) const { return parts_[i]; }
    const std::vector<Part>& parts() const { return parts_; }
    uint32_t part_of(uint32_t v) const { return owner_[v]; }
    uint32_t local(uint32_t v) const { return v - parts_[owner_[v]].begin; }
    uint32_t global(uint32_t p, uint32_t local) const { return parts_[p].begin + local; }
    std::vector<uint32_t> members(uint32_t p) const;

    bool operator==(const PartiteVertexSet& o) const { return parts_ == o.parts_; }

private:
    std::vector<Part> parts_;
    std::vector<uint32_t> owner_;
    uint32_t n_ = 0;
};

// Position of the pair i<j among the C(t,2) pairs in lexicographic order.
inline uint32_t pair_index(uint32_t i, uint32_t j, uint32_t t) { return i * (2 * t - i - 1) / 2 + (j - i - 1); }

struct BipartiteGraph {
    uint32_t left = 0, right = 0;  // part ids
    BitMatrix adj;                 // local indices, left x right
};

// Only crossing edges; one bit matrix per pair of parts.
class MultipartiteGraph {
public:
    MultipartiteGraph() = default;
    explicit MultipartiteGraph(PartiteVertexSet vs);
    static MultipartiteGraph complete(PartiteVertexSet vs);

    const PartiteVertexSet& vertices() const { return vs_; }
    uint32_t t() const { return vs_.t(); }
    const BipartiteGraph& pair(uint32_t i, uint32_t j) const { return pairs_[pair_index(i, j, t())]; }
    BipartiteGraph& pair(uint32_t i, uint32_t j) { return pairs_[pair_index(i, j, t())]; }

    void add_edge(uint32_t u, uint32_t v);
    bool adjacent(uint32_t u, uint32_t v) const;
    std::size_t edge_count() const;
    std::vector<std::pair<uint32_t, uint32_t>> edges() const;

private:
    PartiteVertexSet vs_;
    std::vector<BipartiteGraph> pairs_;
};

// Simple graph on a partite vertex set; edges may lie inside parts.
class Graph {
public:
    Graph() = default;
    explicit Graph(PartiteVertexSet vs);

    const PartiteVertexSet& vertices() const { return vs_; }
    uint32_t n() const { return vs_.n(); }
    void add_edge(uint32_t u, uint32_t v);
    bool adjacent(uint32_t u, uint32_t v) const { return adj_.test(u, v); }
    const Bitset& neighbors(uint32_t v) const { return adj_.row(v); }
    std::size_t edge_count() const { return adj_.count() / 2; }
    std::vector<std::pair<uint32_t, uint32_t>> edges() const;
    bool operator==(const Graph& o) const { return vs_ == o.vs_ && adj_ == o.adj_; }

    // Fails if an edge lies inside a part.
    MultipartiteGraph to_multipartite() const;

private:
    PartiteVertexSet vs_;
    BitMatrix adj_;
};

struct Triple {
    uint32_t a, b, c;  // ascending
    bool operator==(const Triple&) const = default;
    auto operator<=>(const Triple&) const = default;
};

// 3-graph on a partite vertex set. Partite instances reject triples that do
// not meet three distinct parts.
class ThreeGraph {
public:
    ThreeGraph() = default;
    ThreeGraph(PartiteVertexSet vs, bool require_crossing);
    static ThreeGraph partite(PartiteVertexSet vs) { return ThreeGraph(std::move(vs), true); }
    static ThreeGraph general(PartiteVertexSet vs) { return ThreeGraph(std::move(vs), false); }

    const PartiteVertexSet& vertices() const { return vs_; }
    bool requires_crossing() const { return crossing_; }
    void add(uint32_t u, uint32_t v, uint32_t w);
    bool contains(uint32_t u, uint32_t v, uint32_t w) const;
    std::size_t size() const { return set_.size(); }
    std::vector<Triple> triples() const;  // lexicographic
    bool operator==(const ThreeGraph& o) const;

private:
    uint64_t key(uint32_t u, uint32_t v, uint32_t w) const;

    PartiteVertexSet vs_;
    bool crossing_ = true;
    std::unordered_set<uint64_t> set_;
};

using PartiteThreeGraph = ThreeGraph;

// Local tripartite view used by the counting kernels. Parts are indexed 0,1,2
// with local vertex ids; h[x * n[1] + y] holds the z with xyz a hyperedge.
struct DenseChain {
    std::array<uint32_t, 3> n{0, 0, 0};
    BitMatrix xy, xz, yz;
    std::vector<Bitset> h;
    bool complete_host = false;

    const Bitset& hz(uint32_t x, uint32_t y) const { return h[std::size_t(x) * n[1] + y]; }
};

// Builds a dense chain on the given vertex lists (one per part, global ids).
// Null host pointers mean complete bipartite graphs. Hyperedges off the host
// triangles are dropped.
DenseChain make_dense(const ThreeGraph& H, const std::array<const std::vector<uint32_t>*, 3>& verts,
                      const std::array<const BitMatrix*, 3>& host = {nullptr, nullptr, nullptr});

class Chain {
public:
    Chain(MultipartiteGraph graph, ThreeGraph hyper);

    const MultipartiteGraph& graph() const { return g_; }
    const ThreeGraph& hyper() const { return h_; }
    const DenseChain& dense() const { return d_; }

private:
    MultipartiteGraph g_;
    ThreeGraph h_;
    DenseChain d_;
};

Int triangle_count(const MultipartiteGraph& g);
Int triangle_count(const DenseChain& d);
Int hyper_count(const DenseChain& d);
Rat relative_density(const Chain& c);
Rat relative_density(const DenseChain& d);

// Restricts to the given vertex subsets (global ids per part); the optional
// edge sets must be contained in the original pair graphs.
Chain restrict_chain(const Chain& c, const std::array<std::vector<uint32_t>, 3>& sub_vertices);
Chain restrict_chain(const Chain& c, const std::array<std::vector<uint32_t>, 3>& sub_vertices,
                     const MultipartiteGraph& sub_edges);

Rat pair_density(const MultipartiteGraph& g, uint32_t i, uint32_t j);
Rat product_density(const MultipartiteGraph& g);

}  // namespace regulab
