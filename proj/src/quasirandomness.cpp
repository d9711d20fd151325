#include "regulab/quasirandomness.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cstdlib>

namespace regulab {

namespace {

// Unsigned 256-bit accumulator for sums of squares of 128-bit integers.
struct Acc256 {
    uint64_t w[4] = {0, 0, 0, 0};

    void add_at(int limb, unsigned __int128 v) {
        unsigned __int128 carry = 0;
        for (int k = limb; k < 4; ++k) {
            unsigned __int128 s = (unsigned __int128)w[k] + (uint64_t)v + carry;
            w[k] = (uint64_t)s;
            carry = s >> 64;
            v >>= 64;
            if (!v && !carry) break;
        }
    }
    void add_square(__int128 s) {
        unsigned __int128 u = s < 0 ? (unsigned __int128)(-(s + 1)) + 1 : (unsigned __int128)s;
        uint64_t hi = (uint64_t)(u >> 64), lo = (uint64_t)u;
        unsigned __int128 ll = (unsigned __int128)lo * lo;
        unsigned __int128 hl = (unsigned __int128)hi * lo;
        unsigned __int128 hh = (unsigned __int128)hi * hi;
        add_at(0, ll);
        add_at(1, hl);
        add_at(1, hl);
        add_at(2, hh);
    }
    void merge(const Acc256& o) {
        add_at(0, o.w[0]);
        add_at(1, o.w[1]);
        add_at(2, o.w[2]);
        add_at(3, o.w[3]);
    }
    Int value() const {
        Int r(0);
        for (int k = 3; k >= 0; --k) r = (r << 64) + Int(static_cast<unsigned long>(w[k]));
        return r;
    }
};

int bits(uint64_t v) { return v ? 64 - std::countl_zero(v) : 0; }

int64_t max_abs(const std::vector<int64_t>& v) {
    int64_t m = 0;
    for (auto x : v) m = std::max<int64_t>(m, x < 0 ? -x : x);
    return m;
}

// Fast c4 on int64 numerators: sum over (x,x') of S(x,x')^2 with
// S(x,x') = sum_y F(x,y) F(x',y). Requires the caller's overflow guard.
Int c4_fast_i64(uint32_t rows, uint32_t cols, const std::vector<int64_t>& F) {
    Acc256 total;
    int nthreads = omp_get_max_threads();
    std::vector<Acc256> part(static_cast<std::size_t>(nthreads));
#pragma omp parallel
    {
        Acc256& acc = part[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 1)
        for (uint32_t x = 0; x < rows; ++x) {
            const int64_t* fx = &F[std::size_t(x) * cols];
            for (uint32_t x2 = x; x2 < rows; ++x2) {
                const int64_t* fx2 = &F[std::size_t(x2) * cols];
                __int128 s = 0;
                for (uint32_t y = 0; y < cols; ++y) s += (__int128)fx[y] * fx2[y];
                acc.add_square(s);
                if (x2 != x) acc.add_square(s);
            }
        }
    }
    for (const auto& a : part) total.merge(a);
    return total.value();
}

Int c4_fast_mpz(uint32_t rows, uint32_t cols, const std::vector<Int>& F) {
    Int total(0);
#pragma omp parallel
    {
        Int local(0), s, sq;
#pragma omp for schedule(dynamic, 1)
        for (uint32_t x = 0; x < rows; ++x)
            for (uint32_t x2 = x; x2 < rows; ++x2) {
                s = 0;
                for (uint32_t y = 0; y < cols; ++y)
                    mpz_addmul(s.get_mpz_t(), F[std::size_t(x) * cols + y].get_mpz_t(),
                               F[std::size_t(x2) * cols + y].get_mpz_t());
                sq = s * s;
                local += x2 == x ? sq : Int(2 * sq);
            }
#pragma omp critical
        total += local;
    }
    return total;
}

Int c4_naive(uint32_t rows, uint32_t cols, const std::vector<Int>& F) {
    Int total(0), term;
    auto f = [&](uint32_t x, uint32_t y) -> const Int& { return F[std::size_t(x) * cols + y]; };
    for (uint32_t x = 0; x < rows; ++x)
        for (uint32_t x2 = 0; x2 < rows; ++x2)
            for (uint32_t y = 0; y < cols; ++y)
                for (uint32_t y2 = 0; y2 < cols; ++y2) {
                    term = f(x, y) * f(x2, y);
                    term *= f(x, y2);
                    term *= f(x2, y2);
                    total += term;
                }
    return total;
}

bool c4_i64_safe(uint32_t rows, uint32_t cols, int64_t fmax) {
    // |S| <= cols * fmax^2 < 2^125 and rows^2 * S^2 < 2^255.
    int sb = 2 * bits(uint64_t(fmax)) + bits(cols);
    return sb <= 125 && 2 * bits(rows) + 2 * sb <= 254;
}

// Fast oct: sum over z <= z' of weight * c4(g_{z,z'}).
Int oct_fast_i64(uint32_t nx, uint32_t ny, uint32_t nz, const std::vector<int64_t>& F) {
    auto f = [&](uint32_t x, uint32_t y, uint32_t z) { return F[(std::size_t(x) * ny + y) * nz + z]; };
    std::vector<std::pair<uint32_t, uint32_t>> zz;
    for (uint32_t z = 0; z < nz; ++z)
        for (uint32_t z2 = z; z2 < nz; ++z2) zz.emplace_back(z, z2);
    int nthreads = omp_get_max_threads();
    std::vector<Acc256> part(static_cast<std::size_t>(nthreads));
#pragma omp parallel
    {
        Acc256& acc = part[static_cast<std::size_t>(omp_get_thread_num())];
        std::vector<int64_t> g(std::size_t(nx) * ny);
#pragma omp for schedule(dynamic, 1)
        for (std::size_t k = 0; k < zz.size(); ++k) {
            auto [z, z2] = zz[k];
            bool any = false;
            for (uint32_t x = 0; x < nx; ++x)
                for (uint32_t y = 0; y < ny; ++y) {
                    int64_t v = f(x, y, z) * f(x, y, z2);
                    g[std::size_t(x) * ny + y] = v;
                    any |= v != 0;
                }
            if (!any) continue;
            int reps = z == z2 ? 1 : 2;
            for (uint32_t x = 0; x < nx; ++x) {
                const int64_t* gx = &g[std::size_t(x) * ny];
                for (uint32_t x2 = x; x2 < nx; ++x2) {
                    const int64_t* gx2 = &g[std::size_t(x2) * ny];
                    __int128 s = 0;
                    for (uint32_t y = 0; y < ny; ++y) s += (__int128)gx[y] * gx2[y];
                    if (s == 0) continue;
                    int times = reps * (x2 == x ? 1 : 2);
                    for (int r = 0; r < times; ++r) acc.add_square(s);
                }
            }
        }
    }
    Acc256 total;
    for (const auto& a : part) total.merge(a);
    return total.value();
}

Int oct_fast_mpz(uint32_t nx, uint32_t ny, uint32_t nz, const std::vector<Int>& F) {
    auto f = [&](uint32_t x, uint32_t y, uint32_t z) -> const Int& { return F[(std::size_t(x) * ny + y) * nz + z]; };
    Int total(0);
#pragma omp parallel
    {
        Int local(0), s, sq;
        std::vector<Int> g(std::size_t(nx) * ny);
#pragma omp for schedule(dynamic, 1)
        for (uint32_t z = 0; z < nz; ++z)
            for (uint32_t z2 = z; z2 < nz; ++z2) {
                for (uint32_t x = 0; x < nx; ++x)
                    for (uint32_t y = 0; y < ny; ++y) g[std::size_t(x) * ny + y] = f(x, y, z) * f(x, y, z2);
                for (uint32_t x = 0; x < nx; ++x)
                    for (uint32_t x2 = x; x2 < nx; ++x2) {
                        s = 0;
                        for (uint32_t y = 0; y < ny; ++y)
                            mpz_addmul(s.get_mpz_t(), g[std::size_t(x) * ny + y].get_mpz_t(),
                                       g[std::size_t(x2) * ny + y].get_mpz_t());
                        sq = s * s;
                        int times = (z == z2 ? 1 : 2) * (x == x2 ? 1 : 2);
                        local += sq * times;
                    }
            }
#pragma omp critical
        total += local;
    }
    return total;
}

// The literal 6-index sum of the 8 factors.
Int oct_naive(uint32_t nx, uint32_t ny, uint32_t nz, const std::vector<Int>& F) {
    auto f = [&](uint32_t x, uint32_t y, uint32_t z) -> const Int& { return F[(std::size_t(x) * ny + y) * nz + z]; };
    Int total(0), term;
    for (uint32_t x = 0; x < nx; ++x)
        for (uint32_t x2 = 0; x2 < nx; ++x2)
            for (uint32_t y = 0; y < ny; ++y)
                for (uint32_t y2 = 0; y2 < ny; ++y2)
                    for (uint32_t z = 0; z < nz; ++z)
                        for (uint32_t z2 = 0; z2 < nz; ++z2) {
                            const Int* a[8] = {&f(x, y, z),  &f(x, y, z2),  &f(x, y2, z),  &f(x, y2, z2),
                                               &f(x2, y, z), &f(x2, y, z2), &f(x2, y2, z), &f(x2, y2, z2)};
                            bool zero = false;
                            for (auto p : a) zero |= (*p == 0);
                            if (zero) continue;
                            term = *a[0];
                            for (int k = 1; k < 8; ++k) term *= *a[k];
                            total += term;
                        }
    return total;
}

bool oct_i64_safe(uint32_t nx, uint32_t ny, uint32_t nz, int64_t fmax) {
    int gb = 2 * bits(uint64_t(fmax));
    int sb = 2 * gb + bits(ny);
    return gb <= 62 && sb <= 125 && 2 * bits(nx) + 2 * bits(nz) + 2 * sb <= 252;
}

std::vector<Int> widen(const std::vector<int64_t>& v) {
    std::vector<Int> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = Int(static_cast<long>(v[k]));
    return out;
}

// Common-denominator form of a rational table.
Int common_den(const std::vector<Rat>& t) {
    Int d(1);
    for (const auto& q : t) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), q.get_den_mpz_t());
    return d;
}

std::vector<Int> scale(const std::vector<Rat>& t, const Int& d) {
    std::vector<Int> out(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) out[k] = t[k].get_num() * (d / t[k].get_den());
    return out;
}

bool fits_i64(const std::vector<Int>& v, std::vector<int64_t>& out) {
    out.resize(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k].fits_slong_p()) return false;
        out[k] = v[k].get_si();
    }
    return true;
}

Rat over_pow(const Int& num, const Int& den, unsigned k) { return Rat(num, ipow(den, k)); }

}  // namespace

Int c4_sum_scaled(uint32_t rows, uint32_t cols, const std::vector<int64_t>& num, Mode mode) {
    if (mode == Mode::naive) return c4_naive(rows, cols, widen(num));
    if (c4_i64_safe(rows, cols, max_abs(num))) return c4_fast_i64(rows, cols, num);
    return c4_fast_mpz(rows, cols, widen(num));
}

Int oct_sum_scaled(uint32_t nx, uint32_t ny, uint32_t nz, const std::vector<int64_t>& num, Mode mode) {
    if (mode == Mode::naive) return oct_naive(nx, ny, nz, widen(num));
    if (oct_i64_safe(nx, ny, nz, max_abs(num))) return oct_fast_i64(nx, ny, nz, num);
    return oct_fast_mpz(nx, ny, nz, widen(num));
}

Rat c4_sum(const DeviationFunction2& f, Mode mode) {
    Int d = common_den(f.table);
    auto F = scale(f.table, d);
    Rat r;
    std::vector<int64_t> small;
    if (mode == Mode::naive)
        r = over_pow(c4_naive(f.rows, f.cols, F), d, 4);
    else if (fits_i64(F, small))
        r = over_pow(c4_sum_scaled(f.rows, f.cols, small, mode), d, 4);
    else
        r = over_pow(c4_fast_mpz(f.rows, f.cols, F), d, 4);
    r.canonicalize();
    return r;
}

Rat oct_sum(const DeviationFunction3& f, Mode mode) {
    Int d = common_den(f.table);
    auto F = scale(f.table, d);
    Rat r;
    std::vector<int64_t> small;
    if (mode == Mode::naive)
        r = over_pow(oct_naive(f.nx, f.ny, f.nz, F), d, 8);
    else if (fits_i64(F, small))
        r = over_pow(oct_sum_scaled(f.nx, f.ny, f.nz, small, mode), d, 8);
    else
        r = over_pow(oct_fast_mpz(f.nx, f.ny, f.nz, F), d, 8);
    r.canonicalize();
    return r;
}

Certificate pair_quasirandomness(const BitMatrix& adj, const std::vector<uint32_t>& R,
                                 const std::vector<uint32_t>& C, Mode mode) {
    if (R.empty() || C.empty()) throw UndefinedDensityError("pair quasirandomness with an empty side");
    uint32_t rows = static_cast<uint32_t>(R.size()), cols = static_cast<uint32_t>(C.size());
    std::vector<char> bit(std::size_t(rows) * cols);
    int64_t e = 0;
    for (uint32_t x = 0; x < rows; ++x)
        for (uint32_t y = 0; y < cols; ++y) {
            bool b = adj.test(R[x], C[y]);
            bit[std::size_t(x) * cols + y] = b;
            e += b;
        }
    int64_t D = int64_t(rows) * cols;
    std::vector<int64_t> F(bit.size());
    for (std::size_t k = 0; k < F.size(); ++k) F[k] = (bit[k] ? D : 0) - e;
    Certificate c;
    Int raw = c4_sum_scaled(rows, cols, F, mode);
    Int D4 = ipow(Int(static_cast<long>(D)), 4);
    c.raw_sum = Rat(raw, D4);
    c.raw_sum.canonicalize();
    c.normalizer = Rat(Int(static_cast<long>(D)) * D);
    c.value = c.raw_sum / c.normalizer;
    if (c.value < 0) c.value = 0;
    return c;
}

Certificate pair_quasirandomness(const BitMatrix& adj, Mode mode) {
    std::vector<uint32_t> R(adj.rows()), C(adj.cols());
    for (uint32_t k = 0; k < R.size(); ++k) R[k] = k;
    for (uint32_t k = 0; k < C.size(); ++k) C[k] = k;
    return pair_quasirandomness(adj, R, C, mode);
}

Certificate pair_quasirandomness(const MultipartiteGraph& g, const std::vector<uint32_t>& X,
                                 const std::vector<uint32_t>& Y, Mode mode) {
    if (X.empty() || Y.empty()) throw UndefinedDensityError("pair quasirandomness with an empty side");
    std::vector<char> inx(g.vertices().n(), 0);
    for (auto v : X) inx[v] = 1;
    for (auto v : Y)
        if (inx[v]) throw DomainError("pair sides must be disjoint");
    BitMatrix adj(X.size(), Y.size());
    for (uint32_t a = 0; a < X.size(); ++a)
        for (uint32_t b = 0; b < Y.size(); ++b)
            if (g.adjacent(X[a], Y[b])) adj.set(a, b);
    return pair_quasirandomness(adj, mode);
}

Rat multipartite_graph_quasirandomness(const MultipartiteGraph& g, Mode mode) {
    Rat worst(0);
    for (uint32_t i = 0; i < g.t(); ++i)
        if (g.vertices().part(i).size == 0) throw UndefinedDensityError("empty part");
    for (uint32_t i = 0; i < g.t(); ++i)
        for (uint32_t j = i + 1; j < g.t(); ++j) {
            auto c = pair_quasirandomness(g.pair(i, j).adj, mode);
            if (c.value > worst) worst = c.value;
        }
    return worst;
}

Certificate chain_quasirandomness(const DenseChain& d, Mode mode) {
    if (d.n[0] == 0 || d.n[1] == 0 || d.n[2] == 0) throw UndefinedDensityError("chain with an empty part");
    Int T = triangle_count(d);
    Int h = hyper_count(d);
    Certificate c;
    Int nx(d.n[0]), ny(d.n[1]), nz(d.n[2]);
    Rat dens = Rat(Int(static_cast<unsigned long>(d.xy.count())), nx * ny) *
               Rat(Int(static_cast<unsigned long>(d.xz.count())), nx * nz) *
               Rat(Int(static_cast<unsigned long>(d.yz.count())), ny * nz);
    dens.canonicalize();
    c.normalizer = pow(dens, 4) * Rat(nx * nx * ny * ny * nz * nz);
    if (T == 0) {
        c.raw_sum = 0;
        c.value = 0;
        c.degenerate = c.normalizer == 0;
        return c;
    }
    if (!T.fits_slong_p()) throw CapacityError("triangle count exceeds 64 bits");
    int64_t Ti = T.get_si(), hi = h.get_si();
    std::vector<int64_t> F(std::size_t(d.n[0]) * d.n[1] * d.n[2], 0);
    for (uint32_t x = 0; x < d.n[0]; ++x)
        for (auto y : d.xy.row(x).indices()) {
            Bitset tri = d.xz.row(x);
            tri &= d.yz.row(y);
            const Bitset& hz = d.hz(x, y);
            std::size_t base = (std::size_t(x) * d.n[1] + y) * d.n[2];
            for (auto z : tri.indices()) F[base + z] = (hz.test(z) ? Ti : 0) - hi;
        }
    Int raw = oct_sum_scaled(d.n[0], d.n[1], d.n[2], F, mode);
    c.raw_sum = Rat(raw, ipow(T, 8));
    c.raw_sum.canonicalize();
    if (c.normalizer == 0) {
        c.degenerate = true;
        c.value = 0;
        return c;
    }
    c.value = c.raw_sum / c.normalizer;
    if (c.value < 0) c.value = 0;
    return c;
}

Certificate chain_quasirandomness(const Chain& c, Mode mode) { return chain_quasirandomness(c.dense(), mode); }

TPartiteResult tpartite_chain_quasirandomness(const MultipartiteGraph& g, const ThreeGraph& h, const Rat& eta,
                                              Mode mode) {
    uint32_t t = g.t();
    if (t < 3) throw DomainError("t-partite chain check needs t >= 3");
    if (!(g.vertices() == h.vertices())) throw ValidationError("graph and 3-graph use different vertex sets");
    TPartiteResult out;
    std::vector<std::vector<uint32_t>> members(t);
    for (uint32_t p = 0; p < t; ++p) members[p] = g.vertices().members(p);
    for (uint32_t i = 0; i < t; ++i)
        for (uint32_t j = i + 1; j < t; ++j)
            for (uint32_t k = j + 1; k < t; ++k) {
                DenseChain d = make_dense(h, {&members[i], &members[j], &members[k]},
                                          {&g.pair(i, j).adj, &g.pair(i, k).adj, &g.pair(j, k).adj});
                TriplePartCertificate tc{{i, j, k}, chain_quasirandomness(d, mode)};
                if (!tc.cert.holds(eta)) out.holds = false;
                out.certificates.push_back(std::move(tc));
            }
    return out;
}

bool eta_psi_check(const Chain& c, const Rat& eta, const PolyFunction& psi, Mode mode) {
    if (!chain_quasirandomness(c, mode).holds(eta)) return false;
    Rat alpha = psi(product_density(c.graph()));
    return multipartite_graph_quasirandomness(c.graph(), mode) <= alpha;
}

WeakResult weak_quasirandom_check(const ThreeGraph& h, const std::vector<uint32_t>& X1,
                                  const std::vector<uint32_t>& X2, const std::vector<uint32_t>& X3, const Rat& eta,
                                  uint64_t cap) {
    std::size_t a = X1.size(), b = X2.size(), c = X3.size();
    if (a + b >= 63 || (uint64_t(1) << (a + b)) > cap)
        throw CapacityError("weak check needs 2^" + std::to_string(a + b) + " subset pairs, above the cap");
    if (a > 63 || b > 63) throw CapacityError("weak check sides limited to 63 vertices");
    WeakResult out;
    if (a == 0 || b == 0 || c == 0) return out;
    // M[y][z]: mask over X1 of x with xyz in H.
    std::vector<uint64_t> M(b * c, 0);
    int64_t e = 0;
    for (std::size_t y = 0; y < b; ++y)
        for (std::size_t z = 0; z < c; ++z)
            for (std::size_t x = 0; x < a; ++x)
                if (h.contains(X1[x], X2[y], X3[z])) {
                    M[y * c + z] |= uint64_t(1) << x;
                    ++e;
                }
    const __int128 N = __int128(a) * b * c;
    // Violation iff |e' N - e s1 s2 s3| * den > num * N^2 with eta = num/den.
    const Int& en = eta.get_num();
    const Int& ed = eta.get_den();
    Int limit_num = en * Int(static_cast<long>(N)) * Int(static_cast<long>(N));

    std::vector<int64_t> cnt(c);
    auto check = [&](uint64_t s1mask, uint64_t s2mask, int64_t s12) -> bool {
        __int128 pos = 0, neg = 0;
        for (std::size_t z = 0; z < c; ++z) {
            __int128 cz = __int128(cnt[z]) * N - __int128(e) * s12;
            if (cz > 0) pos += cz;
            if (cz < 0) neg -= cz;
        }
        __int128 worst = pos >= neg ? pos : neg;
        if (from_i128(worst) * ed <= limit_num) return true;
        out.holds = false;
        out.witness = {};
        for (std::size_t x = 0; x < a; ++x)
            if (s1mask >> x & 1) out.witness[0].push_back(X1[x]);
        for (std::size_t y = 0; y < b; ++y)
            if (s2mask >> y & 1) out.witness[1].push_back(X2[y]);
        for (std::size_t z = 0; z < c; ++z) {
            __int128 cz = __int128(cnt[z]) * N - __int128(e) * s12;
            if (pos >= neg ? cz > 0 : cz < 0) out.witness[2].push_back(X3[z]);
        }
        out.deviation = Rat(from_i128(worst), Int(static_cast<long>(N)) * Int(static_cast<long>(N)));
        out.deviation.canonicalize();
        return false;
    };

    for (uint64_t g1 = 0; g1 < (uint64_t(1) << a); ++g1) {
        uint64_t s1 = g1 ^ (g1 >> 1);
        int64_t n1 = std::popcount(s1);
        std::fill(cnt.begin(), cnt.end(), 0);
        uint64_t s2 = 0;
        if (!check(s1, s2, 0)) return out;
        for (uint64_t g2 = 1; g2 < (uint64_t(1) << b); ++g2) {
            int y = std::countr_zero(g2);
            s2 ^= uint64_t(1) << y;
            int sign = (s2 >> y & 1) ? 1 : -1;
            for (std::size_t z = 0; z < c; ++z) cnt[z] += sign * std::popcount(M[std::size_t(y) * c + z] & s1);
            if (!check(s1, s2, n1 * std::popcount(s2))) return out;
        }
    }
    return out;
}

}  // namespace regulab
