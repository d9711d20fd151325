#pragma once

// Shared fixtures and brute-force oracles for the test binaries.

#include <algorithm>
#include <array>
#include <map>
#include <vector>

#include "regulab/core.hpp"
#include "regulab/generators.hpp"
#include "regulab/partitions.hpp"

namespace regulab::testing {

inline std::vector<uint32_t> iota_vec(uint32_t n, uint32_t from = 0) {
    std::vector<uint32_t> v(n);
    for (uint32_t k = 0; k < n; ++k) v[k] = from + k;
    return v;
}

// Random graph on the given parts with H a random subset of its triangles.
inline Chain random_chain(const std::vector<uint32_t>& sizes, const Rat& pg, const Rat& ph, uint64_t seed) {
    MultipartiteGraph g = random_multipartite(sizes, pg, seed);
    ThreeGraph h = ThreeGraph::partite(g.vertices());
    SplitMix64 rng(seed ^ 0x5bd1e995u);
    Bernoulli coin(ph);
    const auto& vs = g.vertices();
    for (uint32_t x = 0; x < sizes[0]; ++x)
        for (uint32_t y = 0; y < sizes[1]; ++y)
            for (uint32_t z = 0; z < sizes[2]; ++z) {
                uint32_t a = vs.global(0, x), b = vs.global(1, y), c = vs.global(2, z);
                if (g.adjacent(a, b) && g.adjacent(a, c) && g.adjacent(b, c) && coin(rng)) h.add(a, b, c);
            }
    return Chain(std::move(g), std::move(h));
}

inline Int naive_triangles(const MultipartiteGraph& g) {
    const auto& vs = g.vertices();
    Int n = 0;
    for (auto a : vs.members(0))
        for (auto b : vs.members(1))
            for (auto c : vs.members(2))
                if (g.adjacent(a, b) && g.adjacent(a, c) && g.adjacent(b, c)) ++n;
    return n;
}

inline Rat naive_density(const Chain& ch) {
    const auto& vs = ch.graph().vertices();
    Int t = 0, e = 0;
    for (auto a : vs.members(0))
        for (auto b : vs.members(1))
            for (auto c : vs.members(2))
                if (ch.graph().adjacent(a, b) && ch.graph().adjacent(a, c) && ch.graph().adjacent(b, c)) {
                    ++t;
                    if (ch.hyper().contains(a, b, c)) ++e;
                }
    return ratio(e, t);
}

// Literal 4-fold sum of the balanced adjacency function.
inline Rat naive_c4(const BitMatrix& m) {
    const uint32_t r = static_cast<uint32_t>(m.rows()), c = static_cast<uint32_t>(m.cols());
    Rat d = ratio(Int(static_cast<unsigned long>(m.count())), Int(r) * c);
    auto f = [&](uint32_t x, uint32_t y) -> Rat { return (m.test(x, y) ? Rat(1) : Rat(0)) - d; };
    Rat s = 0;
    for (uint32_t x = 0; x < r; ++x)
        for (uint32_t x2 = 0; x2 < r; ++x2)
            for (uint32_t y = 0; y < c; ++y)
                for (uint32_t y2 = 0; y2 < c; ++y2) s += f(x, y) * f(x, y2) * f(x2, y) * f(x2, y2);
    return s;
}

// Literal 6-index octahedral sum of (1_H - d) on the triangles of G.
inline Rat naive_oct(const Chain& ch) {
    const auto& d = ch.dense();
    Rat dens = relative_density(d);
    std::vector<Rat> f(std::size_t(d.n[0]) * d.n[1] * d.n[2], Rat(0));
    auto idx = [&](uint32_t x, uint32_t y, uint32_t z) { return (std::size_t(x) * d.n[1] + y) * d.n[2] + z; };
    for (uint32_t x = 0; x < d.n[0]; ++x)
        for (uint32_t y = 0; y < d.n[1]; ++y)
            for (uint32_t z = 0; z < d.n[2]; ++z)
                if (d.xy.test(x, y) && d.xz.test(x, z) && d.yz.test(y, z))
                    f[idx(x, y, z)] = (d.hz(x, y).test(z) ? Rat(1) : Rat(0)) - dens;
    Rat s = 0;
    for (uint32_t x = 0; x < d.n[0]; ++x)
        for (uint32_t x2 = 0; x2 < d.n[0]; ++x2)
            for (uint32_t y = 0; y < d.n[1]; ++y)
                for (uint32_t y2 = 0; y2 < d.n[1]; ++y2)
                    for (uint32_t z = 0; z < d.n[2]; ++z)
                        for (uint32_t z2 = 0; z2 < d.n[2]; ++z2)
                            s += f[idx(x, y, z)] * f[idx(x, y, z2)] * f[idx(x, y2, z)] * f[idx(x, y2, z2)] *
                                 f[idx(x2, y, z)] * f[idx(x2, y, z2)] * f[idx(x2, y2, z)] * f[idx(x2, y2, z2)];
    return s;
}

// q by direct enumeration: group host triangles by the label triple.
inline Rat naive_q(const Chain& ch, const EdgePartition& pe) {
    const auto& d = ch.dense();
    std::map<std::array<int32_t, 3>, std::pair<Int, Int>> cells;
    Int T = 0;
    for (uint32_t x = 0; x < d.n[0]; ++x)
        for (uint32_t y = 0; y < d.n[1]; ++y)
            for (uint32_t z = 0; z < d.n[2]; ++z) {
                if (!(d.xy.test(x, y) && d.xz.test(x, z) && d.yz.test(y, z))) continue;
                auto& cell = cells[{pe.pair(0, 1).at(x, y), pe.pair(0, 2).at(x, z), pe.pair(1, 2).at(y, z)}];
                cell.first += 1;
                if (d.hz(x, y).test(z)) cell.second += 1;
                T += 1;
            }
    Rat q = 0;
    for (const auto& [k, cell] : cells) {
        Rat dk = ratio(cell.second, cell.first);
        q += dk * dk * Rat(cell.first);
    }
    return ratio(q.get_num(), q.get_den() * T);
}

// Splits every part of every pair at random into at most `k` labels.
inline EdgePartition random_edge_partition(const Chain& ch, uint32_t k, SplitMix64& rng) {
    EdgePartition pe = EdgePartition::trivial(ch.graph());
    for (auto& pp : pe.pairs) {
        for (auto& l : pp.label)
            if (l >= 0) l = static_cast<int32_t>(rng.below(k));
        pp.parts = k;
        pp.compact();
    }
    return pe;
}

// Each label a splits into 2a and 2a + 1 by a coin flip.
inline PairPartition split_labels(const PairPartition& p, SplitMix64& rng) {
    PairPartition out = p;
    for (auto& l : out.label)
        if (l >= 0) l = 2 * l + static_cast<int32_t>(rng.coin());
    out.parts = 2 * p.parts;
    out.compact();
    return out;
}

inline EdgePartition split_labels(const EdgePartition& e, SplitMix64& rng) {
    EdgePartition out = e;
    for (auto& pp : out.pairs) pp = split_labels(pp, rng);
    return out;
}

inline std::vector<uint32_t> positions(const std::vector<uint32_t>& sub, const std::vector<uint32_t>& sup) {
    std::vector<uint32_t> out;
    for (auto v : sub) out.push_back(static_cast<uint32_t>(std::lower_bound(sup.begin(), sup.end(), v) - sup.begin()));
    return out;
}

// Cuts one coordinate set of cylinder c into two nonempty halves at random.
// Edge partitions are restricted onto the two halves.
inline bool split_cylinder(CylinderChainPartition& P, std::size_t c, SplitMix64& rng) {
    VertexCylinder Y = P.vertex.cylinders[c];
    const uint32_t t = Y.t();
    uint32_t p = static_cast<uint32_t>(rng.below(t));
    if (Y.sets[p].size() < 2) return false;
    std::vector<uint32_t> a, b;
    for (auto v : Y.sets[p]) (rng.coin() ? a : b).push_back(v);
    if (a.empty() || b.empty()) {
        a.assign(Y.sets[p].begin(), Y.sets[p].begin() + 1);
        b.assign(Y.sets[p].begin() + 1, Y.sets[p].end());
    }
    VertexCylinder Ya = Y, Yb = Y;
    Ya.sets[p] = a;
    Yb.sets[p] = b;
    auto restrict_to = [&](const VertexCylinder& sub) {
        EdgePartition e;
        for (const auto& s : sub.sets) e.sizes.push_back(static_cast<uint32_t>(s.size()));
        for (uint32_t i = 0; i < t; ++i)
            for (uint32_t j = i + 1; j < t; ++j)
                e.pairs.push_back(restrict_pair(P.edges[c].pair(i, j), positions(sub.sets[i], Y.sets[i]),
                                                positions(sub.sets[j], Y.sets[j])));
        return e;
    };
    EdgePartition Ea = restrict_to(Ya), Eb = restrict_to(Yb);
    P.vertex.cylinders[c] = Ya;
    P.edges[c] = Ea;
    P.vertex.cylinders.push_back(Yb);
    P.edges.push_back(Eb);
    return true;
}

inline CylinderChainPartition random_cylinder_partition(const PartiteVertexSet& vs, uint32_t max_cylinders,
                                                        uint32_t labels, SplitMix64& rng) {
    CylinderChainPartition P = CylinderChainPartition::trivial(vs);
    uint32_t target = 1 + static_cast<uint32_t>(rng.below(max_cylinders));
    for (int attempt = 0; attempt < 64 && P.vertex.cylinders.size() < target; ++attempt)
        split_cylinder(P, rng.below(P.vertex.cylinders.size()), rng);
    for (auto& E : P.edges)
        for (auto& pp : E.pairs) {
            for (auto& l : pp.label) l = static_cast<int32_t>(rng.below(labels));
            pp.parts = labels;
            pp.compact();
        }
    return P;
}

}  // namespace regulab::testing
