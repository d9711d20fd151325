#include <algorithm>
#include <numeric>

#include "regulab/engines.hpp"

namespace regulab {

namespace {

struct EdgeStat {
    uint32_t r, c;
    int64_t hdeg = 0, codeg = 0;
};

// Host edges of the three pairs with their hyperedge and triangle degrees.
std::array<std::vector<EdgeStat>, 3> edge_stats(const DenseChain& d) {
    std::array<std::vector<EdgeStat>, 3> out;
    std::vector<int64_t> hxy(std::size_t(d.n[0]) * d.n[1]), cxy(hxy.size());
    std::vector<int64_t> hxz(std::size_t(d.n[0]) * d.n[2]), cxz(hxz.size());
    std::vector<int64_t> hyz(std::size_t(d.n[1]) * d.n[2]), cyz(hyz.size());
    for (uint32_t x = 0; x < d.n[0]; ++x)
        for (uint32_t y = 0; y < d.n[1]; ++y) {
            if (!d.xy.test(x, y)) continue;
            Bitset m = d.xz.row(x);
            m &= d.yz.row(y);
            const Bitset& h = d.hz(x, y);
            for (auto z : m.indices()) {
                int64_t e = h.test(z);
                hxy[std::size_t(x) * d.n[1] + y] += e, cxy[std::size_t(x) * d.n[1] + y] += 1;
                hxz[std::size_t(x) * d.n[2] + z] += e, cxz[std::size_t(x) * d.n[2] + z] += 1;
                hyz[std::size_t(y) * d.n[2] + z] += e, cyz[std::size_t(y) * d.n[2] + z] += 1;
            }
        }
    auto collect = [](const BitMatrix& host, const std::vector<int64_t>& h, const std::vector<int64_t>& c) {
        std::vector<EdgeStat> v;
        for (uint32_t r = 0; r < host.rows(); ++r)
            for (auto col : host.row(r).indices())
                v.push_back({r, col, h[std::size_t(r) * host.cols() + col], c[std::size_t(r) * host.cols() + col]});
        return v;
    };
    out[0] = collect(d.xy, hxy, cxy);
    out[1] = collect(d.xz, hxz, cxz);
    out[2] = collect(d.yz, hyz, cyz);
    return out;
}

enum class Kind { sign3, sign2, quantile3, quantile4 };

// Labels of a split of one pair's edges, in the order of stats.
std::vector<int32_t> split_labels(const std::vector<EdgeStat>& es, Kind kind, int64_t H, int64_t T) {
    std::vector<int32_t> lab(es.size(), 0);
    if (kind == Kind::sign3 || kind == Kind::sign2) {
        for (std::size_t k = 0; k < es.size(); ++k) {
            __int128 dev = __int128(es[k].hdeg) * T - __int128(H) * es[k].codeg;
            lab[k] = dev > 0 ? 0 : (dev == 0 && kind == Kind::sign3 ? 1 : 2);
        }
        return lab;
    }
    const std::size_t parts = kind == Kind::quantile3 ? 3 : 4;
    std::vector<std::size_t> order(es.size());
    std::iota(order.begin(), order.end(), 0);
    // Edges in no triangle sort first; the rest by hdeg / codeg.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& u = es[a];
        const auto& v = es[b];
        if ((u.codeg == 0) != (v.codeg == 0)) return u.codeg == 0;
        return __int128(u.hdeg) * v.codeg < __int128(v.hdeg) * u.codeg;
    });
    for (std::size_t k = 0; k < order.size(); ++k) lab[order[k]] = static_cast<int32_t>(k * parts / order.size());
    return lab;
}

PairPartition to_partition(const BitMatrix& host, const std::vector<EdgeStat>& es, const std::vector<int32_t>& lab) {
    PairPartition p = PairPartition::trivial(host.rows(), host.cols(), &host);
    for (std::size_t k = 0; k < es.size(); ++k) p.at(es[k].r, es[k].c) = lab[k];
    p.compact();
    return p;
}

}  // namespace

Rat q_dense(const DenseChain& d, const std::array<PairPartition, 3>& parts) {
    const uint32_t pa = parts[0].parts, pb = parts[1].parts, pc = parts[2].parts;
    // Per-label masks over z.
    std::vector<Bitset> B(std::size_t(pb) * d.n[0], Bitset(d.n[2]));
    std::vector<Bitset> C(std::size_t(pc) * d.n[1], Bitset(d.n[2]));
    for (uint32_t x = 0; x < d.n[0]; ++x)
        for (uint32_t z = 0; z < d.n[2]; ++z)
            if (int32_t b = parts[1].at(x, z); b >= 0) B[std::size_t(b) * d.n[0] + x].set(z);
    for (uint32_t y = 0; y < d.n[1]; ++y)
        for (uint32_t z = 0; z < d.n[2]; ++z)
            if (int32_t c = parts[2].at(y, z); c >= 0) C[std::size_t(c) * d.n[1] + y].set(z);
    const std::size_t cells = std::size_t(pa) * pb * pc;
    std::vector<uint64_t> tri(cells, 0), hyp(cells, 0);
#pragma omp parallel
    {
        std::vector<uint64_t> lt(cells, 0), lh(cells, 0);
#pragma omp for schedule(dynamic, 4) nowait
        for (uint32_t x = 0; x < d.n[0]; ++x)
            for (uint32_t y = 0; y < d.n[1]; ++y) {
                int32_t a = parts[0].at(x, y);
                if (a < 0) continue;
                const Bitset& h = d.hz(x, y);
                for (uint32_t b = 0; b < pb; ++b) {
                    const Bitset& bm = B[std::size_t(b) * d.n[0] + x];
                    for (uint32_t c = 0; c < pc; ++c) {
                        const Bitset& cm = C[std::size_t(c) * d.n[1] + y];
                        std::size_t cell = (std::size_t(a) * pb + b) * pc + c;
                        lt[cell] += Bitset::and_count(bm, cm);
                        lh[cell] += Bitset::and_count(h, bm, cm);
                    }
                }
            }
#pragma omp critical
        for (std::size_t k = 0; k < cells; ++k) tri[k] += lt[k], hyp[k] += lh[k];
    }
    Int T(0);
    Rat s(0);
    for (std::size_t k = 0; k < cells; ++k) {
        if (!tri[k]) continue;
        T += static_cast<unsigned long>(tri[k]);
        Int h(static_cast<unsigned long>(hyp[k]));
        s += Rat(h * h, Int(static_cast<unsigned long>(tri[k])));
    }
    if (T == 0) return Rat(0);
    Rat q = s / Rat(T);
    q.canonicalize();
    return q;
}

std::array<PairPartition, 3> refine_dense(const DenseChain& d, const Rat& gain, uint32_t cap) {
    const std::array<const BitMatrix*, 3> hosts{&d.xy, &d.xz, &d.yz};
    auto es = edge_stats(d);
    int64_t T = 0, H = 0;
    for (const auto& e : es[0]) T += e.codeg, H += e.hdeg;
    if (T == 0) throw UndefinedDensityError("chain has no triangles");
    const Rat dens(Int(static_cast<long>(H)), Int(static_cast<long>(T)));
    const Rat target = dens * dens + gain;

    std::array<PairPartition, 3> trivial;
    for (int p = 0; p < 3; ++p) trivial[p] = PairPartition::trivial(hosts[p]->rows(), hosts[p]->cols(), hosts[p]);

    std::optional<std::array<PairPartition, 3>> best;
    Rat best_q(-1);
    auto consider = [&](const std::array<PairPartition, 3>& cand) {
        for (const auto& p : cand)
            if (p.parts > cap) return;
        Rat q = q_dense(d, cand);
        if (q > best_q) best_q = q, best = cand;
    };

    for (Kind kind : {Kind::sign3, Kind::sign2, Kind::quantile3, Kind::quantile4}) {
        std::array<PairPartition, 3> split;
        for (int p = 0; p < 3; ++p) split[p] = to_partition(*hosts[p], es[p], split_labels(es[p], kind, H, T));
        for (unsigned mask = 1; mask < 8; ++mask) {
            std::array<PairPartition, 3> cand = trivial;
            for (int p = 0; p < 3; ++p)
                if (mask >> p & 1u) cand[p] = split[p];
            consider(cand);
        }
    }
    // Tiny pairs: every 2-way split of the pair's edges.
    for (int p = 0; p < 3; ++p) {
        const std::size_t m = es[p].size();
        if (m < 2 || m > 12) continue;
        for (uint32_t s = 1; s < (1u << (m - 1)); ++s) {
            std::vector<int32_t> lab(m);
            for (std::size_t k = 0; k < m; ++k) lab[k] = (s >> k) & 1u;
            std::array<PairPartition, 3> cand = trivial;
            cand[p] = to_partition(*hosts[p], es[p], lab);
            consider(cand);
        }
    }
    if (!best || best_q < target)
        throw RefinementFailure("no candidate split reaches q >= d^2 + gain (best " +
                                (best ? to_string(best_q) : std::string("none")) + ", need " + to_string(target) + ")");
    return *best;
}

EdgePartition one_cylinder_refine(const Chain& c, const Rat& eta, const ConstantsProfile& profile) {
    if (eta <= 0 || eta > 1) throw DomainError("eta must lie in (0, 1]");
    Certificate cert = chain_quasirandomness(c);
    if (cert.holds(eta)) throw DomainError("chain is already eta-quasirandom (certificate " + to_string(cert.value) + ")");
    ConstantsProfile r = profile.resolved(eta, 3);
    auto parts = refine_dense(c.dense(), *r.refine_gain, r.edge_part_cap);
    const auto& vs = c.graph().vertices();
    EdgePartition e;
    e.sizes = {vs.part(0).size, vs.part(1).size, vs.part(2).size};
    e.pairs = {parts[0], parts[1], parts[2]};
    return e;
}

}  // namespace regulab
