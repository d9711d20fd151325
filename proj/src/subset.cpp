#include <algorithm>

#include "regulab/engines.hpp"
#include "regulab/generators.hpp"
#include "regulab/vcdim.hpp"

namespace regulab {

Chain double_cover_chain(const ThreeGraph& H, const std::vector<uint32_t>& U, const Graph& G) {
    const uint32_t m = static_cast<uint32_t>(U.size());
    PartiteVertexSet vs({{"U0", m}, {"U1", m}, {"U2", m}});
    MultipartiteGraph g(vs);
    for (uint32_t i = 0; i < 3; ++i)
        for (uint32_t j = i + 1; j < 3; ++j)
            for (uint32_t x = 0; x < m; ++x)
                for (uint32_t y = 0; y < m; ++y)
                    if (x != y && G.adjacent(U[x], U[y])) g.pair(i, j).adj.set(x, y);
    ThreeGraph h = ThreeGraph::partite(vs);
    for (uint32_t x = 0; x < m; ++x)
        for (uint32_t y = 0; y < m; ++y) {
            if (x == y || !G.adjacent(U[x], U[y])) continue;
            for (uint32_t z = 0; z < m; ++z) {
                if (z == x || z == y || !G.adjacent(U[x], U[z]) || !G.adjacent(U[y], U[z])) continue;
                if (H.contains(U[x], U[y], U[z])) h.add(x, m + y, 2 * m + z);
            }
        }
    return Chain(std::move(g), std::move(h));
}

SubsetResult quasirandom_subset(const ThreeGraph& H, const Rat& eta, const PolyFunction& psi,
                                const ConstantsProfile& profile, uint64_t seed) {
    if (eta <= 0 || eta > 1) throw DomainError("eta must lie in (0, 1]");
    const uint32_t n = H.vertices().n();
    if (n < 3) throw DomainError("subset search needs at least 3 vertices");
    const uint32_t t = std::min(std::max<uint32_t>(profile.parts, 3), n);
    const uint32_t s = profile.subset_s;
    if (s < 3 || s > t) throw DomainError("subset_s must lie in [3, t]");
    ConstantsProfile r = profile.resolved(eta, t);
    PartiteVertexSet vs = equitable_partition(n, t);
    ThreeGraph Hc = crossing_part(H, vs);
    HyperResult hr = hyper_cylinder_regularity(Hc, eta * eta, psi, r);

    SubsetResult out;
    const auto& cyl = hr.partition.vertex.cylinders;
    for (std::size_t c = 1; c < cyl.size(); ++c)
        if (cyl[c].volume() > cyl[out.cylinder].volume()) out.cylinder = c;
    const VertexCylinder& Y = cyl[out.cylinder];
    const EdgePartition& E = hr.partition.edges[out.cylinder];

    // Truncate every part of the cylinder to the smallest size.
    std::size_t m = Y.sets[0].size();
    for (const auto& set : Y.sets) m = std::min(m, set.size());
    std::vector<std::vector<uint32_t>> parts(t);
    for (uint32_t p = 0; p < t; ++p) parts[p].assign(Y.sets[p].begin(), Y.sets[p].begin() + m);

    // Largest edge part of each pair, restricted to the truncated sets.
    SplitMix64 rng(seed);
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> edges(std::size_t(t) * (t - 1) / 2);
    std::size_t k_min = m * m;
    for (uint32_t i = 0; i < t; ++i)
        for (uint32_t j = i + 1; j < t; ++j) {
            const auto& pp = E.pair(i, j);
            int32_t best = 0;
            std::size_t best_size = 0;
            for (uint32_t a = 0; a < pp.parts; ++a)
                if (pp.part_size(int32_t(a)) > best_size) best_size = pp.part_size(int32_t(a)), best = int32_t(a);
            auto& list = edges[pair_index(i, j, t)];
            for (uint32_t x = 0; x < m; ++x)
                for (uint32_t y = 0; y < m; ++y)
                    if (pp.at(x, y) == best) list.emplace_back(x, y);
            k_min = std::min(k_min, list.size());
        }
    // Density-equalizing subsampling: seeded shuffle, keep the first k_min edges.
    for (auto& list : edges) {
        std::vector<uint32_t> idx(list.size());
        for (uint32_t k = 0; k < idx.size(); ++k) idx[k] = k;
        shuffle(idx, rng);
        idx.resize(k_min);
        std::sort(idx.begin(), idx.end());
        std::vector<std::pair<uint32_t, uint32_t>> kept;
        for (auto k : idx) kept.push_back(list[k]);
        list = std::move(kept);
    }
    const Rat delta = ratio(Int(static_cast<unsigned long>(k_min)), Int(static_cast<unsigned long>(m * m)));
    out.common_density = delta;

    // Colour part triples by density bucket of width eta^2.
    const Rat width = eta * eta;
    auto colour = [&](uint32_t i, uint32_t j, uint32_t k) {
        BitMatrix a(m, m), b(m, m), c(m, m);
        for (auto [x, y] : edges[pair_index(i, j, t)]) a.set(x, y);
        for (auto [x, y] : edges[pair_index(i, k, t)]) b.set(x, y);
        for (auto [x, y] : edges[pair_index(j, k, t)]) c.set(x, y);
        DenseChain d = make_dense(H, {&parts[i], &parts[j], &parts[k]}, {&a, &b, &c});
        Rat q = relative_density(d) / width;
        Int f;
        mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
        return f;
    };
    std::vector<Int> col(std::size_t(t) * t * t);
    for (uint32_t i = 0; i < t; ++i)
        for (uint32_t j = i + 1; j < t; ++j)
            for (uint32_t k = j + 1; k < t; ++k) col[(std::size_t(i) * t + j) * t + k] = colour(i, j, k);

    // First monochromatic s-subset in lexicographic order.
    std::vector<uint32_t> pick(s);
    for (uint32_t k = 0; k < s; ++k) pick[k] = k;
    bool found = false;
    while (true) {
        std::optional<Int> c0;
        bool mono = true;
        for (uint32_t a = 0; a < s && mono; ++a)
            for (uint32_t b = a + 1; b < s && mono; ++b)
                for (uint32_t c = b + 1; c < s && mono; ++c) {
                    const Int& v = col[(std::size_t(pick[a]) * t + pick[b]) * t + pick[c]];
                    if (!c0) c0 = v;
                    else if (*c0 != v) mono = false;
                }
        if (mono) {
            found = true;
            break;
        }
        int k = int(s) - 1;
        while (k >= 0 && pick[k] == t - s + uint32_t(k)) --k;
        if (k < 0) break;
        ++pick[k];
        for (uint32_t q = k + 1; q < s; ++q) pick[q] = pick[q - 1] + 1;
    }
    if (!found)
        throw SearchFailure("no monochromatic " + std::to_string(s) + "-subset among " + std::to_string(t) +
                            " parts; raise the profile's parts (t)");
    out.chosen_parts = pick;

    // U and G: chosen crossing graphs plus random within-part graphs at density delta.
    out.G = Graph(H.vertices());
    for (auto p : pick) out.U.insert(out.U.end(), parts[p].begin(), parts[p].end());
    std::sort(out.U.begin(), out.U.end());
    for (uint32_t a = 0; a < s; ++a)
        for (uint32_t b = a + 1; b < s; ++b) {
            uint32_t i = pick[a], j = pick[b];
            for (auto [x, y] : edges[pair_index(i, j, t)]) out.G.add_edge(parts[i][x], parts[j][y]);
        }
    for (auto p : pick) {
        std::vector<std::pair<uint32_t, uint32_t>> all;
        for (uint32_t x = 0; x < m; ++x)
            for (uint32_t y = x + 1; y < m; ++y) all.emplace_back(parts[p][x], parts[p][y]);
        // Nearest integer to delta * C(m, 2), halves rounded up.
        Rat target = delta * Rat(Int(static_cast<unsigned long>(all.size())));
        Int cnt;
        Rat shifted = target + Rat(1, 2);
        mpz_fdiv_q(cnt.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
        std::vector<uint32_t> idx(all.size());
        for (uint32_t k = 0; k < idx.size(); ++k) idx[k] = k;
        shuffle(idx, rng);
        for (std::size_t k = 0; k < cnt.get_ui(); ++k) out.G.add_edge(all[idx[k]].first, all[idx[k]].second);
    }

    Chain dc = double_cover_chain(H, out.U, out.G);
    out.certificate = chain_quasirandomness(dc);
    out.eta_psi = eta_psi_check(dc, eta, psi);
    out.relative_density = relative_density(dc);
    return out;
}

RodlResult rodl_sparse_dense(const ThreeGraph& H, const ThreeGraph& F, const Rat& eps, const PolyFunction& psi,
                             const ConstantsProfile& profile, uint64_t seed) {
    if (F.vertices().n() > 8) throw CapacityError("forbidden pattern larger than 8 vertices");
    RodlResult r;
    r.subset = quasirandom_subset(H, eps, psi, profile, seed);
    const Rat& d = r.subset.relative_density;
    if (d <= eps) {
        r.flag = "sparse";
        return r;
    }
    if (d >= 1 - eps) {
        r.flag = "dense";
        return r;
    }
    const auto& U = r.subset.U;
    ThreeGraph sub = ThreeGraph::general(PartiteVertexSet({{"U", static_cast<uint32_t>(U.size())}}));
    for (uint32_t x = 0; x < U.size(); ++x)
        for (uint32_t y = x + 1; y < U.size(); ++y)
            for (uint32_t z = y + 1; z < U.size(); ++z)
                if (H.contains(U[x], U[y], U[z])) sub.add(x, y, z);
    if (auto e = induced_copy_search(F, sub)) {
        std::vector<uint32_t> w;
        for (auto v : *e) w.push_back(U[v]);
        r.flag = "witness";
        r.witness = std::move(w);
        return r;
    }
    r.flag = "neither";
    r.diagnostic = "relative density " + to_string(d) + " lies outside [0, " + to_string(eps) + "] and [" +
                   to_string(1 - eps) + ", 1], and H[U] has no induced copy of F; desk-scale constants do not force the dichotomy";
    return r;
}

}  // namespace regulab
