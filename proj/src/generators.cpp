#include "regulab/generators.hpp"

#include <utility>

namespace regulab {

uint64_t SplitMix64::next() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

uint64_t SplitMix64::below(uint64_t n) {
    if (n == 0) throw DomainError("below(0)");
    const uint64_t floor = (0 - n) % n;
    uint64_t u;
    do u = next();
    while (u < floor);
    return u % n;
}

Bernoulli::Bernoulli(const Rat& p) {
    if (p < 0 || p > 1) throw DomainError("probability outside [0, 1]: " + to_string(p));
    Int scaled = (Int(p.get_num()) << 64) / Int(p.get_den());
    threshold_ = 0;
    // scaled <= 2^64: assemble from two 32-bit limbs plus the top bit.
    Int hi = scaled >> 32, lo = scaled - (hi << 32);
    threshold_ = (static_cast<unsigned __int128>(hi.get_ui()) << 32) | lo.get_ui();
}

bool Bernoulli::operator()(SplitMix64& rng) const { return rng.next() < threshold_; }

void shuffle(std::vector<uint32_t>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i-- > 1;) std::swap(v[i], v[rng.below(i + 1)]);
}

ThreeGraph make_vd(unsigned d) {
    if (d < 1) throw DomainError("make_vd needs d >= 1");
    if (d > 3) throw CapacityError("make_vd supports d <= 3 (C has 2^(d^2) vertices)");
    const uint32_t nc = 1u << (d * d);
    PartiteVertexSet vs({{"A", d}, {"B", d}, {"C", nc}});
    ThreeGraph h = ThreeGraph::partite(vs);
    for (uint32_t s = 0; s < nc; ++s)
        for (uint32_t a = 0; a < d; ++a)
            for (uint32_t b = 0; b < d; ++b)
                if ((s >> (a * d + b)) & 1u) h.add(a, d + b, 2 * d + s);
    return h;
}

MultipartiteGraph make_fd(unsigned d) {
    if (d > 16) throw CapacityError("make_fd supports d <= 16");
    const uint32_t nb = 1u << d;
    MultipartiteGraph g(PartiteVertexSet({{"A", d}, {"B", nb}}));
    for (uint32_t s = 0; s < nb; ++s)
        for (uint32_t a = 0; a < d; ++a)
            if ((s >> a) & 1u) g.pair(0, 1).adj.set(a, s);
    return g;
}

ThreeGraph cone_hypergraph(const MultipartiteGraph& g, uint32_t n) {
    if (g.t() != 2) throw DomainError("cone_hypergraph needs a bipartite graph");
    if (n < 1) throw DomainError("cone_hypergraph needs n >= 1");
    const auto& vs = g.vertices();
    std::string apex = "C";
    while (apex == vs.part(0).name || apex == vs.part(1).name) apex += "'";
    PartiteVertexSet cvs({{vs.part(0).name, vs.part(0).size}, {vs.part(1).name, vs.part(1).size}, {apex, n}});
    ThreeGraph h = ThreeGraph::partite(cvs);
    for (auto [u, v] : g.edges())
        for (uint32_t c = 0; c < n; ++c) h.add(u, v, vs.n() + c);
    if (h.size() != g.edge_count() * n) throw ValidationError("cone hypergraph edge count check failed");
    return h;
}

ThreeGraph random_link_hypergraph(uint32_t nA, uint32_t nB, uint32_t nC, uint64_t seed) {
    if (!nA || !nB || !nC) throw DomainError("random_link_hypergraph needs sizes >= 1");
    PartiteVertexSet vs({{"A", nA}, {"B", nB}, {"C", nC}});
    ThreeGraph h = ThreeGraph::partite(vs);
    SplitMix64 rng(seed);
    for (uint32_t c = 0; c < nC; ++c) {
        std::vector<uint32_t> xs, ys;
        for (uint32_t a = 0; a < nA; ++a)
            if (rng.coin()) xs.push_back(a);
        for (uint32_t b = 0; b < nB; ++b)
            if (rng.coin()) ys.push_back(nA + b);
        for (auto x : xs)
            for (auto y : ys) h.add(x, y, nA + nB + c);
    }
    return h;
}

ThreeGraph random_tournament_3graph(uint32_t n, uint64_t seed) {
    if (n < 3) throw DomainError("random_tournament_3graph needs n >= 3");
    SplitMix64 rng(seed);
    std::vector<std::vector<char>> fwd(n, std::vector<char>(n, 0));  // fwd[i][j]: i -> j
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i + 1; j < n; ++j) {
            bool o = rng.coin();
            fwd[i][j] = o;
            fwd[j][i] = !o;
        }
    ThreeGraph h = ThreeGraph::general(PartiteVertexSet({{"V", n}}));
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i + 1; j < n; ++j)
            for (uint32_t k = j + 1; k < n; ++k) {
                bool cyc = (fwd[i][j] && fwd[j][k] && fwd[k][i]) || (fwd[j][i] && fwd[k][j] && fwd[i][k]);
                if (cyc) h.add(i, j, k);
            }
    return h;
}

ThreeGraph random_partite_3graph(const std::vector<uint32_t>& sizes, const Rat& p, uint64_t seed) {
    PartiteVertexSet vs = PartiteVertexSet::sized(sizes);
    ThreeGraph h = ThreeGraph::partite(vs);
    Bernoulli coin(p);
    SplitMix64 rng(seed);
    const uint32_t n = vs.n();
    for (uint32_t a = 0; a < n; ++a)
        for (uint32_t b = a + 1; b < n; ++b) {
            if (vs.part_of(a) == vs.part_of(b)) continue;
            for (uint32_t c = b + 1; c < n; ++c) {
                if (vs.part_of(c) == vs.part_of(b) || vs.part_of(c) == vs.part_of(a)) continue;
                if (coin(rng)) h.add(a, b, c);
            }
        }
    return h;
}

MultipartiteGraph random_bipartite(uint32_t nA, uint32_t nB, const Rat& p, uint64_t seed) {
    MultipartiteGraph g(PartiteVertexSet({{"A", nA}, {"B", nB}}));
    Bernoulli coin(p);
    SplitMix64 rng(seed);
    auto& adj = g.pair(0, 1).adj;
    for (uint32_t a = 0; a < nA; ++a)
        for (uint32_t b = 0; b < nB; ++b)
            if (coin(rng)) adj.set(a, b);
    return g;
}

MultipartiteGraph random_multipartite(const std::vector<uint32_t>& sizes, const Rat& p, uint64_t seed) {
    MultipartiteGraph g(PartiteVertexSet::sized(sizes));
    Bernoulli coin(p);
    SplitMix64 rng(seed);
    for (uint32_t i = 0; i < g.t(); ++i)
        for (uint32_t j = i + 1; j < g.t(); ++j) {
            auto& adj = g.pair(i, j).adj;
            for (uint32_t a = 0; a < sizes[i]; ++a)
                for (uint32_t b = 0; b < sizes[j]; ++b)
                    if (coin(rng)) adj.set(a, b);
        }
    return g;
}

Graph random_graph(uint32_t n, const Rat& p, uint64_t seed) {
    Graph g(PartiteVertexSet({{"V", n}}));
    Bernoulli coin(p);
    SplitMix64 rng(seed);
    for (uint32_t u = 0; u < n; ++u)
        for (uint32_t v = u + 1; v < n; ++v)
            if (coin(rng)) g.add_edge(u, v);
    return g;
}

MultipartiteGraph half_graph(uint32_t n) {
    MultipartiteGraph g(PartiteVertexSet({{"A", n}, {"B", n}}));
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i; j < n; ++j) g.pair(0, 1).adj.set(i, j);
    return g;
}

ThreeGraph link_structured_3graph(uint32_t n, const Rat& noise, uint64_t seed) {
    PartiteVertexSet vs = PartiteVertexSet::sized({n, n, n});
    ThreeGraph h = ThreeGraph::partite(vs);
    SplitMix64 rng(seed);
    Bernoulli half(rat(1, 2)), flip(noise);
    BitMatrix e1(n, n);
    for (uint32_t x = 0; x < n; ++x)
        for (uint32_t y = 0; y < n; ++y)
            if (half(rng)) e1.set(x, y);
    for (uint32_t x = 0; x < n; ++x)
        for (uint32_t y = 0; y < n; ++y)
            for (uint32_t z = 0; z < n; ++z)
                if (e1.test(x, y) != flip(rng)) h.add(x, n + y, 2 * n + z);
    return h;
}

}  // namespace regulab
