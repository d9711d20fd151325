#include "regulab/vcdim.hpp"

#include <algorithm>
#include <bit>
#include <functional>

namespace regulab {

namespace {

// Next k-subset mask in colex order (Gosper's hack); 0 when exhausted below 2^n.
uint32_t next_combination(uint32_t x, uint32_t n) {
    uint32_t c = x & (~x + 1);
    uint32_t r = x + c;
    uint32_t y = (((r ^ x) >> 2) / c) | r;
    return (n < 32 && y >> n) ? 0 : y;
}

std::vector<uint32_t> combinations(uint32_t n, uint32_t k) {
    std::vector<uint32_t> out;
    if (k > n) return out;
    if (k == 0) return {0};
    for (uint32_t x = (1u << k) - 1; x; x = next_combination(x, n)) out.push_back(x);
    return out;
}

std::vector<uint32_t> bits(uint32_t m) {
    std::vector<uint32_t> v;
    for (; m; m &= m - 1) v.push_back(static_cast<uint32_t>(std::countr_zero(m)));
    return v;
}

// Trace of member on S, compressed to |S| bits.
uint32_t trace(uint32_t member, const std::vector<uint32_t>& S) {
    uint32_t t = 0;
    for (std::size_t k = 0; k < S.size(); ++k)
        if (member >> S[k] & 1u) t |= 1u << k;
    return t;
}

[[noreturn]] void unverified(const char* what) {
    throw Error(std::string("internal error: ") + what + " witness failed re-verification");
}

}  // namespace

SetSystem SetSystem::neighborhoods(const Graph& g) {
    if (g.n() > 32) throw CapacityError("set systems hold at most 32 elements");
    SetSystem s;
    s.n = g.n();
    for (uint32_t v = 0; v < g.n(); ++v) {
        uint32_t m = 0;
        for (auto u : g.neighbors(v).indices()) m |= 1u << u;
        s.members.push_back(m);
    }
    return s;
}

SetSystem SetSystem::right_neighborhoods(const MultipartiteGraph& g) {
    if (g.t() != 2) throw DomainError("expected a bipartite graph");
    const BitMatrix& adj = g.pair(0, 1).adj;
    if (adj.rows() > 32) throw CapacityError("set systems hold at most 32 elements");
    SetSystem s;
    s.n = static_cast<uint32_t>(adj.rows());
    BitMatrix tr = adj.transposed();
    for (uint32_t b = 0; b < tr.rows(); ++b) {
        uint32_t m = 0;
        for (auto a : tr.row(b).indices()) m |= 1u << a;
        s.members.push_back(m);
    }
    return s;
}

void SetSystem::validate() const {
    if (n > 32) throw ValidationError("universe larger than 32");
    for (auto m : members)
        if (n < 32 && (m >> n)) throw ValidationError("member outside the universe");
}

bool verify_shattering(const SetSystem& s, const VcWitness& w) {
    const std::size_t d = w.shattered.size();
    if (w.realizer.size() != (std::size_t(1) << d)) return false;
    for (std::size_t m = 0; m < w.realizer.size(); ++m) {
        if (w.realizer[m] >= s.members.size()) return false;
        if (trace(s.members[w.realizer[m]], w.shattered) != m) return false;
    }
    return true;
}

VcResult vc_dimension(const SetSystem& s, unsigned cap_d, uint32_t max_n) {
    s.validate();
    if (s.n > max_n) throw CapacityError("vc_dimension: universe of " + std::to_string(s.n) + " exceeds the cap " +
                                         std::to_string(max_n));
    VcResult best;
    if (!s.members.empty()) best.witness.realizer = {0};
    // Shattering is hereditary, so the first size with no shattered set ends the search.
    for (unsigned d = 1; d <= std::min<unsigned>(cap_d, s.n); ++d) {
        if ((std::size_t(1) << d) > s.members.size()) break;
        bool found = false;
        for (uint32_t S : combinations(s.n, d)) {
            std::vector<uint32_t> el = bits(S);
            std::vector<int64_t> real(std::size_t(1) << d, -1);
            std::size_t hit = 0;
            for (std::size_t i = 0; i < s.members.size() && hit < real.size(); ++i) {
                uint32_t t = trace(s.members[i], el);
                if (real[t] < 0) real[t] = static_cast<int64_t>(i), ++hit;
            }
            if (hit == real.size()) {
                best.d = d;
                best.witness.shattered = el;
                best.witness.realizer.assign(real.begin(), real.end());
                found = true;
                break;
            }
        }
        if (!found) break;
    }
    if (best.d > 0 && !verify_shattering(s, best.witness)) unverified("VC");
    return best;
}

bool verify_vc2(const ThreeGraph& H, const Vc2Witness& w) {
    const std::size_t d = w.A.size();
    if (w.B.size() != d || w.realizer.size() != (std::size_t(1) << (d * d))) return false;
    std::vector<uint32_t> used = w.A;
    used.insert(used.end(), w.B.begin(), w.B.end());
    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end()) return false;
    for (std::size_t m = 0; m < w.realizer.size(); ++m) {
        uint32_t v = w.realizer[m];
        if (v >= H.vertices().n() || std::binary_search(used.begin(), used.end(), v)) return false;
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                if (H.contains(w.A[a], w.B[b], v) != bool(m >> (a * d + b) & 1u)) return false;
    }
    return true;
}

Vc2Result vc2_dimension(const ThreeGraph& H, unsigned cap_d, uint32_t max_n) {
    const uint32_t n = H.vertices().n();
    if (n > max_n)
        throw CapacityError("vc2_dimension: " + std::to_string(n) + " vertices exceed the cap " + std::to_string(max_n));
    Vc2Result best;
    for (unsigned d = 1; d <= cap_d; ++d) {
        const std::size_t patterns = std::size_t(1) << (d * d);
        if (n < 2 * d || n - 2 * d < patterns) break;
        auto As = combinations(n, d);
        // Lowest A index with a shattering B wins; B scanned in order for that A.
        std::vector<std::optional<Vc2Witness>> found(As.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::size_t ia = 0; ia < As.size(); ++ia) {
            const uint32_t Am = As[ia];
            const auto A = bits(Am);
            const uint32_t rest = n - d;
            for (uint32_t Bm0 : combinations(rest, d)) {
                // Map B's positions into the complement of A.
                std::vector<uint32_t> B;
                {
                    uint32_t pos = 0;
                    for (uint32_t v = 0; v < n && B.size() < d; ++v) {
                        if (Am >> v & 1u) continue;
                        if (Bm0 >> pos & 1u) B.push_back(v);
                        ++pos;
                    }
                }
                if (B.front() < A.front()) continue;  // {A, B} unordered
                std::vector<int64_t> real(patterns, -1);
                std::size_t hit = 0;
                for (uint32_t v = 0; v < n && hit < patterns; ++v) {
                    if (Am >> v & 1u || std::find(B.begin(), B.end(), v) != B.end()) continue;
                    uint32_t m = 0;
                    for (uint32_t a = 0; a < d; ++a)
                        for (uint32_t b = 0; b < d; ++b)
                            if (H.contains(A[a], B[b], v)) m |= 1u << (a * d + b);
                    if (real[m] < 0) real[m] = v, ++hit;
                }
                if (hit == patterns) {
                    Vc2Witness w{A, B, std::vector<uint32_t>(real.begin(), real.end())};
                    found[ia] = std::move(w);
                    break;
                }
            }
        }
        auto it = std::find_if(found.begin(), found.end(), [](const auto& f) { return f.has_value(); });
        if (it == found.end()) break;
        best.d = d;
        best.witness = **it;
    }
    if (best.d > 0 && !verify_vc2(H, best.witness)) unverified("VC2");
    return best;
}

// ------------------------------------------------------------ embeddings

bool verify_bipartite_embedding(const MultipartiteGraph& F, const Graph& G, const Embedding& e) {
    const auto& vs = F.vertices();
    if (F.t() != 2 || e.size() != vs.n()) return false;
    std::vector<uint32_t> img = e;
    std::sort(img.begin(), img.end());
    if (std::adjacent_find(img.begin(), img.end()) != img.end()) return false;
    for (auto v : e)
        if (v >= G.n()) return false;
    for (auto a : vs.members(0))
        for (auto b : vs.members(1))
            if (G.adjacent(e[a], e[b]) != F.adjacent(a, b)) return false;
    return true;
}

bool verify_tripartite_embedding(const ThreeGraph& V, const ThreeGraph& H, const Embedding& e) {
    const auto& vs = V.vertices();
    if (vs.t() != 3 || e.size() != vs.n()) return false;
    std::vector<uint32_t> img = e;
    std::sort(img.begin(), img.end());
    if (std::adjacent_find(img.begin(), img.end()) != img.end()) return false;
    for (auto v : e)
        if (v >= H.vertices().n()) return false;
    for (auto a : vs.members(0))
        for (auto b : vs.members(1))
            for (auto c : vs.members(2))
                if (H.contains(e[a], e[b], e[c]) != V.contains(a, b, c)) return false;
    return true;
}

bool verify_induced_copy(const ThreeGraph& F, const ThreeGraph& H, const Embedding& e) {
    const uint32_t k = F.vertices().n();
    if (e.size() != k) return false;
    std::vector<uint32_t> img = e;
    std::sort(img.begin(), img.end());
    if (std::adjacent_find(img.begin(), img.end()) != img.end()) return false;
    for (auto v : e)
        if (v >= H.vertices().n()) return false;
    for (uint32_t x = 0; x < k; ++x)
        for (uint32_t y = x + 1; y < k; ++y)
            for (uint32_t z = y + 1; z < k; ++z)
                if (H.contains(e[x], e[y], e[z]) != F.contains(x, y, z)) return false;
    return true;
}

namespace {

// Generic injective backtracking: pattern vertices in `order`, `ok(k)` checks
// every constraint whose last vertex is order[k] once it is placed.
std::optional<Embedding> backtrack(uint32_t pattern_n, uint32_t host_n, const std::vector<uint32_t>& order,
                                   const std::function<bool(const Embedding&, std::size_t)>& ok) {
    Embedding e(pattern_n, 0);
    std::vector<char> used(host_n, 0);
    std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
        if (k == order.size()) return true;
        for (uint32_t v = 0; v < host_n; ++v) {
            if (used[v]) continue;
            e[order[k]] = v;
            used[v] = 1;
            if (ok(e, k) && go(k + 1)) return true;
            used[v] = 0;
        }
        return false;
    };
    if (go(0)) return e;
    return std::nullopt;
}

}  // namespace

std::optional<Embedding> bipartitely_induced(const MultipartiteGraph& F, const Graph& G) {
    const auto& vs = F.vertices();
    if (F.t() != 2) throw DomainError("pattern must be bipartite");
    if (vs.n() > 10) throw CapacityError("bipartite pattern larger than 10 vertices");
    std::vector<uint32_t> order(vs.n());
    for (uint32_t k = 0; k < vs.n(); ++k) order[k] = k;  // left part first, then right
    auto ok = [&](const Embedding& e, std::size_t k) {
        uint32_t x = order[k];
        for (std::size_t j = 0; j < k; ++j) {
            uint32_t y = order[j];
            if (vs.part_of(x) == vs.part_of(y)) continue;
            if (G.adjacent(e[x], e[y]) != F.adjacent(x, y)) return false;
        }
        return true;
    };
    auto r = backtrack(vs.n(), G.n(), order, ok);
    if (r && !verify_bipartite_embedding(F, G, *r)) unverified("bipartite");
    return r;
}

std::optional<Embedding> tripartitely_induced(const ThreeGraph& V, const ThreeGraph& H) {
    const auto& vs = V.vertices();
    if (vs.t() != 3) throw DomainError("pattern must be tripartite");
    if (vs.n() > 9) throw CapacityError("tripartite pattern larger than 9 vertices");
    std::vector<uint32_t> order(vs.n());
    for (uint32_t k = 0; k < vs.n(); ++k) order[k] = k;
    auto ok = [&](const Embedding& e, std::size_t k) {
        uint32_t z = order[k];
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) {
                uint32_t x = order[i], y = order[j];
                uint32_t px = vs.part_of(x), py = vs.part_of(y), pz = vs.part_of(z);
                if (px == py || px == pz || py == pz) continue;
                if (H.contains(e[x], e[y], e[z]) != V.contains(x, y, z)) return false;
            }
        return true;
    };
    auto r = backtrack(vs.n(), H.vertices().n(), order, ok);
    if (r && !verify_tripartite_embedding(V, H, *r)) unverified("tripartite");
    return r;
}

std::optional<Embedding> induced_copy_search(const ThreeGraph& F, const ThreeGraph& H) {
    const uint32_t k = F.vertices().n();
    if (k > 8) throw CapacityError("induced pattern larger than 8 vertices");
    std::vector<uint32_t> order(k);
    for (uint32_t i = 0; i < k; ++i) order[i] = i;
    auto ok = [&](const Embedding& e, std::size_t m) {
        uint32_t z = order[m];
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                if (H.contains(e[order[i]], e[order[j]], e[z]) != F.contains(order[i], order[j], z)) return false;
        return true;
    };
    auto r = backtrack(k, H.vertices().n(), order, ok);
    if (r && !verify_induced_copy(F, H, *r)) unverified("induced copy");
    return r;
}

}  // namespace regulab
