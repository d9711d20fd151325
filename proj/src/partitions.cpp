#include "regulab/partitions.hpp"

#include <omp.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "regulab/generators.hpp"

namespace regulab {

// ---------------------------------------------------------------- containers

PairPartition PairPartition::trivial(uint32_t rows, uint32_t cols, const BitMatrix* host) {
    PairPartition p;
    p.rows = rows;
    p.cols = cols;
    p.label.assign(std::size_t(rows) * cols, -1);
    bool any = false;
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c)
            if (!host || host->test(r, c)) {
                p.at(r, c) = 0;
                any = true;
            }
    p.parts = any ? 1 : 0;
    return p;
}

BitMatrix PairPartition::host() const {
    BitMatrix m(rows, cols);
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c)
            if (at(r, c) >= 0) m.set(r, c);
    return m;
}

BitMatrix PairPartition::part_matrix(int32_t part) const {
    BitMatrix m(rows, cols);
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c)
            if (at(r, c) == part) m.set(r, c);
    return m;
}

std::size_t PairPartition::part_size(int32_t part) const {
    return static_cast<std::size_t>(std::count(label.begin(), label.end(), part));
}

void PairPartition::compact() {
    std::unordered_map<int32_t, int32_t> remap;
    for (auto& l : label) {
        if (l < 0) continue;
        auto it = remap.find(l);
        if (it == remap.end()) it = remap.emplace(l, static_cast<int32_t>(remap.size())).first;
        l = it->second;
    }
    parts = static_cast<uint32_t>(remap.size());
}

PairPartition restrict_pair(const PairPartition& p, const std::vector<uint32_t>& rows,
                            const std::vector<uint32_t>& cols) {
    PairPartition out;
    out.rows = static_cast<uint32_t>(rows.size());
    out.cols = static_cast<uint32_t>(cols.size());
    out.label.resize(std::size_t(out.rows) * out.cols);
    for (uint32_t r = 0; r < out.rows; ++r)
        for (uint32_t c = 0; c < out.cols; ++c) out.at(r, c) = p.at(rows[r], cols[c]);
    out.compact();
    return out;
}

uint32_t EdgePartition::max_parts() const {
    uint32_t m = 0;
    for (const auto& p : pairs) m = std::max(m, p.parts);
    return m;
}

EdgePartition EdgePartition::trivial(const std::vector<uint32_t>& sizes) {
    EdgePartition e;
    e.sizes = sizes;
    uint32_t t = e.t();
    e.pairs.resize(std::size_t(t) * (t - 1) / 2);
    for (uint32_t i = 0; i < t; ++i)
        for (uint32_t j = i + 1; j < t; ++j) e.pair(i, j) = PairPartition::trivial(sizes[i], sizes[j]);
    return e;
}

EdgePartition EdgePartition::trivial(const MultipartiteGraph& host) {
    EdgePartition e;
    uint32_t t = host.t();
    for (uint32_t p = 0; p < t; ++p) e.sizes.push_back(host.vertices().part(p).size);
    e.pairs.resize(std::size_t(t) * (t - 1) / 2);
    for (uint32_t i = 0; i < t; ++i)
        for (uint32_t j = i + 1; j < t; ++j)
            e.pair(i, j) = PairPartition::trivial(e.sizes[i], e.sizes[j], &host.pair(i, j).adj);
    return e;
}

Int VertexCylinder::volume() const {
    Int v(1);
    for (const auto& s : sets) v *= static_cast<unsigned long>(s.size());
    return v;
}

VertexCylinderPartition VertexCylinderPartition::trivial(const PartiteVertexSet& vs) {
    VertexCylinderPartition P;
    P.vertices = vs;
    VertexCylinder Y;
    for (uint32_t p = 0; p < vs.t(); ++p) Y.sets.push_back(vs.members(p));
    P.cylinders.push_back(std::move(Y));
    return P;
}

// Exact tiling test: the volumes add up to the whole product and no two
// cylinders meet (two cylinders meet iff every coordinate set pair meets).
void VertexCylinderPartition::validate() const {
    uint32_t t = vertices.t();
    Int total(0), whole(1);
    for (uint32_t p = 0; p < t; ++p) whole *= vertices.part(p).size;
    std::vector<std::vector<Bitset>> mem(cylinders.size());
    for (std::size_t c = 0; c < cylinders.size(); ++c) {
        const auto& Y = cylinders[c];
        if (Y.t() != t) throw ValidationError("cylinder has the wrong number of parts");
        for (uint32_t p = 0; p < t; ++p) {
            Bitset b(vertices.n());
            if (Y.sets[p].empty()) throw ValidationError("cylinder with an empty coordinate set");
            for (std::size_t k = 0; k < Y.sets[p].size(); ++k) {
                uint32_t v = Y.sets[p][k];
                if (v >= vertices.n() || vertices.part_of(v) != p)
                    throw ValidationError("cylinder coordinate set leaves its part");
                if (k && Y.sets[p][k - 1] >= v) throw ValidationError("cylinder sets must be strictly ascending");
                b.set(v);
            }
            mem[c].push_back(std::move(b));
        }
        total += Y.volume();
    }
    if (total != whole) throw ValidationError("cylinder volumes do not add up to the product space");
    for (std::size_t a = 0; a < cylinders.size(); ++a)
        for (std::size_t b = a + 1; b < cylinders.size(); ++b) {
            bool meet = true;
            for (uint32_t p = 0; p < t && meet; ++p) meet = Bitset::and_count(mem[a][p], mem[b][p]) > 0;
            if (meet) throw ValidationError("cylinders " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
        }
}

CylinderChainPartition CylinderChainPartition::trivial(const PartiteVertexSet& vs) {
    CylinderChainPartition P;
    P.vertex = VertexCylinderPartition::trivial(vs);
    std::vector<uint32_t> sizes;
    for (uint32_t p = 0; p < vs.t(); ++p) sizes.push_back(vs.part(p).size);
    P.edges.push_back(EdgePartition::trivial(sizes));
    return P;
}

void CylinderChainPartition::validate() const {
    vertex.validate();
    if (edges.size() != vertex.cylinders.size()) throw ValidationError("one edge partition per cylinder required");
    for (std::size_t c = 0; c < edges.size(); ++c) {
        const auto& Y = vertex.cylinders[c];
        const auto& E = edges[c];
        if (E.t() != Y.t()) throw ValidationError("edge partition arity mismatch");
        for (uint32_t i = 0; i < Y.t(); ++i)
            for (uint32_t j = i + 1; j < Y.t(); ++j) {
                const auto& pp = E.pair(i, j);
                if (pp.rows != Y.sets[i].size() || pp.cols != Y.sets[j].size())
                    throw ValidationError("edge partition host differs from its cylinder");
                std::vector<char> used(pp.parts, 0);
                for (auto l : pp.label) {
                    if (l < 0 || l >= int32_t(pp.parts))
                        throw ValidationError("cylinder edge partition must cover the complete bipartite graph");
                    used[l] = 1;
                }
                for (auto u : used)
                    if (!u) throw ValidationError("empty edge part");
            }
    }
}

uint32_t CylinderChainPartition::max_edge_parts() const {
    uint32_t m = 0;
    for (const auto& e : edges) m = std::max(m, e.max_parts());
    return m;
}

uint32_t ChainPartition::max_edge_parts() const {
    uint32_t m = 0;
    for (const auto& e : edges) m = std::max(m, e.parts);
    return m;
}

ChainPartition ChainPartition::from_classes(const PartiteVertexSet& vs, std::vector<std::vector<uint32_t>> classes) {
    ChainPartition Q;
    Q.vertices = vs;
    Q.classes = std::move(classes);
    Q.class_of.assign(vs.n(), 0);
    for (uint32_t p = 0; p < Q.classes.size(); ++p)
        for (auto v : Q.classes[p]) Q.class_of[v] = p;
    uint32_t m = Q.size();
    Q.edges.resize(std::size_t(m) * (m ? m - 1 : 0) / 2);
    for (uint32_t p = 0; p < m; ++p)
        for (uint32_t q = p + 1; q < m; ++q)
            Q.edge(p, q) = PairPartition::trivial(static_cast<uint32_t>(Q.classes[p].size()),
                                                  static_cast<uint32_t>(Q.classes[q].size()));
    return Q;
}

void ChainPartition::validate() const {
    std::vector<int> seen(vertices.n(), -1);
    for (uint32_t p = 0; p < classes.size(); ++p) {
        if (classes[p].empty()) throw ValidationError("empty vertex class");
        for (auto v : classes[p]) {
            if (v >= vertices.n()) throw ValidationError("vertex class member out of range");
            if (seen[v] >= 0) throw ValidationError("vertex classes overlap");
            seen[v] = static_cast<int>(p);
        }
    }
    for (uint32_t v = 0; v < vertices.n(); ++v) {
        if (seen[v] < 0) throw ValidationError("vertex classes do not cover vertex " + std::to_string(v));
        if (class_of.size() != vertices.n() || class_of[v] != uint32_t(seen[v]))
            throw ValidationError("class_of disagrees with the classes");
    }
    uint32_t m = size();
    if (edges.size() != std::size_t(m) * (m ? m - 1 : 0) / 2) throw ValidationError("edge partition count mismatch");
    for (uint32_t p = 0; p < m; ++p)
        for (uint32_t q = p + 1; q < m; ++q) {
            const auto& pp = edge(p, q);
            if (pp.rows != classes[p].size() || pp.cols != classes[q].size())
                throw ValidationError("edge partition host differs from its class pair");
            std::vector<char> used(pp.parts, 0);
            for (auto l : pp.label) {
                if (l < 0 || l >= int32_t(pp.parts)) throw ValidationError("edge partition must cover its class pair");
                used[l] = 1;
            }
            for (auto u : used)
                if (!u) throw ValidationError("empty edge part");
        }
}

// --------------------------------------------------------------------- q

std::vector<SubchainStats> subchain_stats(const ThreeGraph& H, const std::array<const std::vector<uint32_t>*, 3>& verts,
                                          const std::array<const PairPartition*, 3>& pe, Mode mode) {
    const auto& X = *verts[0];
    const auto& Y = *verts[1];
    const auto& Z = *verts[2];
    const uint32_t n0 = static_cast<uint32_t>(X.size()), n1 = static_cast<uint32_t>(Y.size()),
                   n2 = static_cast<uint32_t>(Z.size());
    const PairPartition& pxy = *pe[0];
    const PairPartition& pxz = *pe[1];
    const PairPartition& pyz = *pe[2];
    if (pxy.rows != n0 || pxy.cols != n1 || pxz.rows != n0 || pxz.cols != n2 || pyz.rows != n1 || pyz.cols != n2)
        throw DomainError("pair partitions do not match the vertex lists");
    const uint32_t ka = pxy.parts, kb = pxz.parts, kc = pyz.parts;
    std::vector<SubchainStats> out;
    if (!ka || !kb || !kc) return out;
    const std::size_t K = std::size_t(ka) * kb * kc;
    std::vector<uint64_t> tri(K, 0), hyp(K, 0);

    if (mode == Mode::naive) {
        for (uint32_t a = 0; a < ka; ++a)
            for (uint32_t b = 0; b < kb; ++b)
                for (uint32_t c = 0; c < kc; ++c) {
                    std::size_t k = (std::size_t(a) * kb + b) * kc + c;
                    for (uint32_t x = 0; x < n0; ++x)
                        for (uint32_t y = 0; y < n1; ++y)
                            for (uint32_t z = 0; z < n2; ++z)
                                if (pxy.at(x, y) == int32_t(a) && pxz.at(x, z) == int32_t(b) &&
                                    pyz.at(y, z) == int32_t(c)) {
                                    ++tri[k];
                                    if (H.contains(X[x], Y[y], Z[z])) ++hyp[k];
                                }
                }
    } else {
        // B[b*n0 + x]: z with label(x,z) = b; C[c*n1 + y]: z with label(y,z) = c.
        std::vector<Bitset> B(std::size_t(kb) * n0, Bitset(n2)), C(std::size_t(kc) * n1, Bitset(n2));
        for (uint32_t x = 0; x < n0; ++x)
            for (uint32_t z = 0; z < n2; ++z)
                if (pxz.at(x, z) >= 0) B[std::size_t(pxz.at(x, z)) * n0 + x].set(z);
        for (uint32_t y = 0; y < n1; ++y)
            for (uint32_t z = 0; z < n2; ++z)
                if (pyz.at(y, z) >= 0) C[std::size_t(pyz.at(y, z)) * n1 + y].set(z);
        Bitset hostz_x(n2), hostz_y(n2);
        int nthreads = omp_get_max_threads();
        std::vector<std::vector<uint64_t>> ltri(nthreads, std::vector<uint64_t>(K, 0)),
            lhyp(nthreads, std::vector<uint64_t>(K, 0));
#pragma omp parallel
        {
            auto& mt = ltri[omp_get_thread_num()];
            auto& mh = lhyp[omp_get_thread_num()];
            Bitset hz(n2);
#pragma omp for schedule(dynamic, 1)
            for (uint32_t x = 0; x < n0; ++x)
                for (uint32_t y = 0; y < n1; ++y) {
                    int32_t a = pxy.at(x, y);
                    if (a < 0) continue;
                    hz.clear();
                    for (uint32_t z = 0; z < n2; ++z)
                        if (pxz.at(x, z) >= 0 && pyz.at(y, z) >= 0 && H.contains(X[x], Y[y], Z[z])) hz.set(z);
                    for (uint32_t b = 0; b < kb; ++b) {
                        const Bitset& bx = B[std::size_t(b) * n0 + x];
                        if (!bx.any()) continue;
                        for (uint32_t c = 0; c < kc; ++c) {
                            const Bitset& cy = C[std::size_t(c) * n1 + y];
                            std::size_t k = (std::size_t(a) * kb + b) * kc + c;
                            mt[k] += Bitset::and_count(bx, cy);
                            mh[k] += Bitset::and_count(bx, cy, hz);
                        }
                    }
                }
        }
        for (int th = 0; th < nthreads; ++th)
            for (std::size_t k = 0; k < K; ++k) {
                tri[k] += ltri[th][k];
                hyp[k] += lhyp[th][k];
            }
    }
    for (uint32_t a = 0; a < ka; ++a)
        for (uint32_t b = 0; b < kb; ++b)
            for (uint32_t c = 0; c < kc; ++c) {
                std::size_t k = (std::size_t(a) * kb + b) * kc + c;
                if (tri[k]) out.push_back({int32_t(a), int32_t(b), int32_t(c), tri[k], hyp[k]});
            }
    return out;
}

Rat q_from_stats(const std::vector<SubchainStats>& stats) {
    Int T(0);
    Rat s(0);
    for (const auto& st : stats) {
        T += static_cast<unsigned long>(st.triangles);
        Int h(static_cast<unsigned long>(st.hyperedges));
        s += Rat(h * h, Int(static_cast<unsigned long>(st.triangles)));
    }
    if (T == 0) return Rat(0);
    Rat q = s / Rat(T);
    q.canonicalize();
    return q;
}

Rat q_local(const ThreeGraph& H, const std::array<const std::vector<uint32_t>*, 3>& verts,
            const std::array<const PairPartition*, 3>& pe, Mode mode) {
    if (mode == Mode::fast) return q_from_stats(subchain_stats(H, verts, pe, mode));
    // Literal form: recount every subchain and its host triangles by enumeration.
    auto stats = subchain_stats(H, verts, pe, Mode::naive);
    Int T(0);
    const auto& X = *verts[0];
    const auto& Y = *verts[1];
    const auto& Z = *verts[2];
    for (uint32_t x = 0; x < X.size(); ++x)
        for (uint32_t y = 0; y < Y.size(); ++y)
            for (uint32_t z = 0; z < Z.size(); ++z)
                if (pe[0]->at(x, y) >= 0 && pe[1]->at(x, z) >= 0 && pe[2]->at(y, z) >= 0) T += 1;
    Rat q(0);
    for (const auto& st : stats) {
        Rat w = ratio(Int(static_cast<unsigned long>(st.triangles)), T);
        Rat d = ratio(Int(static_cast<unsigned long>(st.hyperedges)), Int(static_cast<unsigned long>(st.triangles)));
        q += w * d * d;
    }
    q.canonicalize();
    return q;
}

Rat q_edge_partition(const Chain& c, const EdgePartition& pe, Mode mode) {
    const auto& g = c.graph();
    if (pe.t() != 3) throw DomainError("edge partition of a chain must be tripartite");
    for (uint32_t p = 0; p < 3; ++p)
        if (pe.sizes[p] != g.vertices().part(p).size) throw DomainError("edge partition sizes differ from the chain");
    for (uint32_t i = 0; i < 3; ++i)
        for (uint32_t j = i + 1; j < 3; ++j)
            if (!(pe.pair(i, j).host() == g.pair(i, j).adj))
                throw DomainError("edge partition is not hosted on the chain graph");
    std::array<std::vector<uint32_t>, 3> v;
    for (uint32_t p = 0; p < 3; ++p) v[p] = g.vertices().members(p);
    return q_local(c.hyper(), {&v[0], &v[1], &v[2]}, {&pe.pair(0, 1), &pe.pair(0, 2), &pe.pair(1, 2)}, mode);
}

Rat q_cylinder(const ThreeGraph& H, const VertexCylinder& Y, const EdgePartition& pe, Mode mode) {
    uint32_t t = Y.t();
    Rat q(0);
    for (uint32_t i = 0; i < t; ++i)
        for (uint32_t j = i + 1; j < t; ++j)
            for (uint32_t k = j + 1; k < t; ++k)
                q += q_local(H, {&Y.sets[i], &Y.sets[j], &Y.sets[k]}, {&pe.pair(i, j), &pe.pair(i, k), &pe.pair(j, k)},
                             mode);
    return q;
}

Rat q_partition(const ThreeGraph& H, const CylinderChainPartition& P, Mode mode) {
    const auto& vs = P.vertex.vertices;
    Int whole(1);
    for (uint32_t p = 0; p < vs.t(); ++p) whole *= vs.part(p).size;
    std::vector<Rat> terms(P.vertex.cylinders.size());
    // Cylinders are independent; the kernels inside stay serial per task.
#pragma omp parallel for schedule(dynamic, 1) if (mode == Mode::fast && P.vertex.cylinders.size() > 1)
    for (std::size_t c = 0; c < P.vertex.cylinders.size(); ++c) {
        const auto& Y = P.vertex.cylinders[c];
        terms[c] = ratio(Y.volume(), whole) * q_cylinder(H, Y, P.edges[c], mode);
    }
    Rat q(0);
    for (const auto& r : terms) q += r;
    q.canonicalize();
    return q;
}

// ------------------------------------------------------------ refinement

bool refines(const PairPartition& coarse, const PairPartition& fine) {
    if (coarse.rows != fine.rows || coarse.cols != fine.cols) throw DomainError("pair partitions on different hosts");
    std::unordered_map<int32_t, int32_t> to;
    for (std::size_t k = 0; k < fine.label.size(); ++k) {
        int32_t f = fine.label[k], c = coarse.label[k];
        if ((f < 0) != (c < 0)) throw DomainError("pair partitions on different hosts");
        if (f < 0) continue;
        auto [it, fresh] = to.emplace(f, c);
        if (!fresh && it->second != c) return false;
    }
    return true;
}

bool refines(const EdgePartition& coarse, const EdgePartition& fine) {
    if (coarse.sizes != fine.sizes) throw DomainError("edge partitions on different hosts");
    for (std::size_t k = 0; k < coarse.pairs.size(); ++k)
        if (!refines(coarse.pairs[k], fine.pairs[k])) return false;
    return true;
}

std::vector<int> containing_cylinders(const VertexCylinderPartition& coarse, const VertexCylinderPartition& fine) {
    uint32_t t = coarse.vertices.t();
    uint32_t n = coarse.vertices.n();
    std::vector<std::vector<Bitset>> mem(coarse.cylinders.size());
    for (std::size_t c = 0; c < coarse.cylinders.size(); ++c)
        for (uint32_t p = 0; p < t; ++p) {
            Bitset b(n);
            for (auto v : coarse.cylinders[c].sets[p]) b.set(v);
            mem[c].push_back(std::move(b));
        }
    std::vector<int> out(fine.cylinders.size(), -1);
    for (std::size_t f = 0; f < fine.cylinders.size(); ++f)
        for (std::size_t c = 0; c < coarse.cylinders.size() && out[f] < 0; ++c) {
            bool inside = true;
            for (uint32_t p = 0; p < t && inside; ++p)
                for (auto v : fine.cylinders[f].sets[p])
                    if (!mem[c][p].test(v)) {
                        inside = false;
                        break;
                    }
            if (inside) out[f] = static_cast<int>(c);
        }
    return out;
}

bool refines(const VertexCylinderPartition& coarse, const VertexCylinderPartition& fine) {
    if (!(coarse.vertices == fine.vertices)) throw DomainError("cylinder partitions on different vertex sets");
    for (int c : containing_cylinders(coarse, fine))
        if (c < 0) return false;
    return true;
}

static std::vector<uint32_t> positions_in(const std::vector<uint32_t>& sub, const std::vector<uint32_t>& sup) {
    std::vector<uint32_t> out;
    out.reserve(sub.size());
    for (auto v : sub) out.push_back(static_cast<uint32_t>(std::lower_bound(sup.begin(), sup.end(), v) - sup.begin()));
    return out;
}

bool refines(const CylinderChainPartition& coarse, const CylinderChainPartition& fine) {
    if (!(coarse.vertex.vertices == fine.vertex.vertices)) throw DomainError("partitions on different vertex sets");
    auto home = containing_cylinders(coarse.vertex, fine.vertex);
    uint32_t t = coarse.vertex.vertices.t();
    for (std::size_t f = 0; f < home.size(); ++f) {
        if (home[f] < 0) return false;
        const auto& Yf = fine.vertex.cylinders[f];
        const auto& Yc = coarse.vertex.cylinders[home[f]];
        for (uint32_t i = 0; i < t; ++i)
            for (uint32_t j = i + 1; j < t; ++j) {
                auto r = positions_in(Yf.sets[i], Yc.sets[i]);
                auto c = positions_in(Yf.sets[j], Yc.sets[j]);
                PairPartition restricted = restrict_pair(coarse.edges[home[f]].pair(i, j), r, c);
                if (!refines(restricted, fine.edges[f].pair(i, j))) return false;
            }
    }
    return true;
}

PairPartition common_refinement(const std::vector<const PairPartition*>& parts) {
    if (parts.empty()) throw DomainError("common refinement of nothing");
    const PairPartition& first = *parts.front();
    PairPartition out;
    out.rows = first.rows;
    out.cols = first.cols;
    out.label.assign(first.label.size(), -1);
    std::map<std::vector<int32_t>, int32_t> ids;
    std::vector<int32_t> key(parts.size());
    for (std::size_t k = 0; k < first.label.size(); ++k) {
        bool in_host = first.label[k] >= 0;
        for (std::size_t s = 0; s < parts.size(); ++s) {
            const auto& p = *parts[s];
            if (p.rows != first.rows || p.cols != first.cols || (p.label[k] >= 0) != in_host)
                throw DomainError("common refinement of partitions on different hosts");
            key[s] = p.label[k];
        }
        if (!in_host) continue;
        auto [it, fresh] = ids.emplace(key, static_cast<int32_t>(ids.size()));
        out.label[k] = it->second;
    }
    out.parts = static_cast<uint32_t>(ids.size());
    return out;
}

EdgePartition common_refinement(const std::vector<EdgePartition>& parts) {
    if (parts.empty()) throw DomainError("common refinement of nothing");
    EdgePartition out;
    out.sizes = parts.front().sizes;
    for (const auto& p : parts)
        if (p.sizes != out.sizes) throw DomainError("common refinement of partitions on different hosts");
    out.pairs.resize(parts.front().pairs.size());
    for (std::size_t k = 0; k < out.pairs.size(); ++k) {
        std::vector<const PairPartition*> col;
        for (const auto& p : parts) col.push_back(&p.pairs[k]);
        out.pairs[k] = common_refinement(col);
    }
    return out;
}

// ------------------------------------------------------------------ venn

ChainPartition venn_diagram(const CylinderChainPartition& P) {
    const auto& vs = P.vertex.vertices;
    const auto& cyl = P.vertex.cylinders;
    const uint32_t n = vs.n(), m = static_cast<uint32_t>(cyl.size());
    // profile[v]: cylinders whose coordinate set for v's part contains v.
    std::vector<Bitset> profile(n, Bitset(m));
    std::vector<std::vector<int32_t>> pos(m, std::vector<int32_t>(n, -1));
    for (uint32_t c = 0; c < m; ++c)
        for (uint32_t p = 0; p < cyl[c].t(); ++p)
            for (uint32_t k = 0; k < cyl[c].sets[p].size(); ++k) {
                uint32_t v = cyl[c].sets[p][k];
                profile[v].set(c);
                pos[c][v] = static_cast<int32_t>(k);
            }
    std::vector<std::vector<uint32_t>> classes;
    for (uint32_t p = 0; p < vs.t(); ++p) {
        std::map<std::vector<uint32_t>, uint32_t> by_profile;
        std::vector<uint32_t> order;
        std::vector<std::vector<uint32_t>> local;
        for (auto v : vs.members(p)) {
            auto key = profile[v].indices();
            auto [it, fresh] = by_profile.emplace(key, static_cast<uint32_t>(local.size()));
            if (fresh) local.emplace_back();
            local[it->second].push_back(v);
        }
        for (auto& cl : local) classes.push_back(std::move(cl));
    }
    ChainPartition Q = ChainPartition::from_classes(vs, std::move(classes));
    const uint32_t k = Q.size();
#pragma omp parallel for schedule(dynamic, 1)
    for (uint32_t p = 0; p < k; ++p)
        for (uint32_t q = p + 1; q < k; ++q) {
            const auto& Vp = Q.classes[p];
            const auto& Vq = Q.classes[q];
            uint32_t ip = vs.part_of(Vp[0]), iq = vs.part_of(Vq[0]);
            if (ip == iq) continue;  // same part: no cylinder edges, stays trivial
            Bitset shared = profile[Vp[0]];
            shared &= profile[Vq[0]];
            auto common = shared.indices();
            PairPartition& out = Q.edge(p, q);
            std::map<std::vector<int32_t>, int32_t> ids;
            std::vector<int32_t> key(common.size());
            for (uint32_t a = 0; a < Vp.size(); ++a)
                for (uint32_t b = 0; b < Vq.size(); ++b) {
                    for (std::size_t s = 0; s < common.size(); ++s) {
                        uint32_t c = common[s];
                        key[s] = P.edges[c].pair(ip, iq).at(pos[c][Vp[a]], pos[c][Vq[b]]);
                    }
                    auto [it, fresh] = ids.emplace(key, static_cast<int32_t>(ids.size()));
                    out.at(a, b) = it->second;
                }
            out.parts = static_cast<uint32_t>(ids.size());
        }
    return Q;
}

// ---------------------------------------------------------------- audits

namespace {

bool homogeneous(const Rat& d, const Rat& gamma) { return d <= gamma || d >= 1 - gamma; }

struct PairInfo {
    Rat density;
    Rat alpha;
};

}  // namespace

HomogeneityAudit homogeneity_audit(const ThreeGraph& H, const ChainPartition& Q, const Rat& gamma,
                                   const PolyFunction& psi, const Rat& sparse_threshold) {
    HomogeneityAudit out;
    out.gamma = gamma;
    const uint32_t m = Q.size();
    const Int N = ipow(Int(Q.vertices.n()), 3);
    // Per class pair and label: density and pair certificate.
    std::vector<std::vector<PairInfo>> info(Q.edges.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t e = 0; e < Q.edges.size(); ++e) {
        const auto& pp = Q.edges[e];
        for (uint32_t a = 0; a < pp.parts; ++a) {
            BitMatrix bm = pp.part_matrix(int32_t(a));
            PairInfo pi;
            pi.density = ratio(Int(static_cast<unsigned long>(bm.count())), Int(pp.rows) * pp.cols);
            pi.alpha = pair_quasirandomness(bm).value;
            info[e].push_back(std::move(pi));
        }
    }
    std::vector<std::array<uint32_t, 3>> triples;
    for (uint32_t p = 0; p < m; ++p)
        for (uint32_t q = p + 1; q < m; ++q)
            for (uint32_t r = q + 1; r < m; ++r) triples.push_back({p, q, r});
    Int hom(0), qr(0), sparse(0), crossing(0);
#pragma omp parallel
    {
        Int lhom(0), lqr(0), lsparse(0), lcross(0);
#pragma omp for schedule(dynamic, 1)
        for (std::size_t s = 0; s < triples.size(); ++s) {
            auto [p, q, r] = triples[s];
            const auto& Vp = Q.classes[p];
            const auto& Vq = Q.classes[q];
            const auto& Vr = Q.classes[r];
            std::array<const PairPartition*, 3> pe{&Q.edge(p, q), &Q.edge(p, r), &Q.edge(q, r)};
            auto stats = subchain_stats(H, {&Vp, &Vq, &Vr}, pe, Mode::fast);
            lcross += Int(static_cast<unsigned long>(Vp.size())) * Vq.size() * Vr.size();
            const auto& ipq = info[pair_index(p, q, m)];
            const auto& ipr = info[pair_index(p, r, m)];
            const auto& iqr = info[pair_index(q, r, m)];
            for (const auto& st : stats) {
                Int w(static_cast<unsigned long>(st.triangles));
                Rat d = ratio(Int(static_cast<unsigned long>(st.hyperedges)), w);
                if (homogeneous(d, gamma)) lhom += w;
                Rat delta = ipq[st.a].density * ipr[st.b].density * iqr[st.c].density;
                Rat cap = psi(delta);
                if (ipq[st.a].alpha <= cap && ipr[st.b].alpha <= cap && iqr[st.c].alpha <= cap) lqr += w;
                if (ipq[st.a].density < sparse_threshold || ipr[st.b].density < sparse_threshold ||
                    iqr[st.c].density < sparse_threshold)
                    lsparse += w;
            }
        }
#pragma omp critical
        {
            hom += lhom;
            qr += lqr;
            sparse += lsparse;
            crossing += lcross;
        }
    }
    // Each unordered class triple accounts for 6 ordered triples.
    out.homogeneous_mass = ratio(6 * hom, N);
    out.quasirandom_mass = ratio(6 * qr, N);
    out.sparse_mass = ratio(6 * sparse, N);
    out.crossing_mass = ratio(6 * crossing, N);
    out.crossing_homogeneous_mass = ratio(hom, crossing);
    out.degenerate_mass = 0;
    return out;
}

namespace {

struct SubVerdict {
    bool homogeneous = true;
    bool eta_ok = true;
};

struct CylinderCache {
    // per pair: per label density and alpha
    std::vector<std::vector<PairInfo>> pairs;
    std::map<std::array<int32_t, 6>, SubVerdict> sub;  // (i,j,k,a,b,c)
    std::map<std::vector<int32_t>, std::array<bool, 5>> tuple;
};

}  // namespace

TupleAudit tuple_audit(const ThreeGraph& H, const CylinderChainPartition& P, const PolyFunction& psi,
                       const TupleAuditOptions& opt) {
    const auto& vs = P.vertex.vertices;
    const uint32_t t = vs.t();
    const auto& cyl = P.vertex.cylinders;
    TupleAudit out;
    Int whole(1);
    for (uint32_t p = 0; p < t; ++p) whole *= vs.part(p).size;
    if (whole == 0) return out;

    std::vector<CylinderCache> cache(cyl.size());
    auto pair_info = [&](std::size_t c, uint32_t i, uint32_t j) -> const std::vector<PairInfo>& {
        auto& slot = cache[c].pairs[pair_index(i, j, t)];
        if (slot.empty()) {
            const auto& pp = P.edges[c].pair(i, j);
            for (uint32_t a = 0; a < pp.parts; ++a) {
                BitMatrix bm = pp.part_matrix(int32_t(a));
                slot.push_back({ratio(Int(static_cast<unsigned long>(bm.count())), Int(pp.rows) * pp.cols),
                                pair_quasirandomness(bm).value});
            }
        }
        return slot;
    };
    auto sub_verdict = [&](std::size_t c, uint32_t i, uint32_t j, uint32_t k, int32_t a, int32_t b,
                           int32_t cc) -> const SubVerdict& {
        std::array<int32_t, 6> key{int32_t(i), int32_t(j), int32_t(k), a, b, cc};
        auto it = cache[c].sub.find(key);
        if (it != cache[c].sub.end()) return it->second;
        const auto& Y = cyl[c];
        const auto& E = P.edges[c];
        BitMatrix mab = E.pair(i, j).part_matrix(a), mac = E.pair(i, k).part_matrix(b),
                  mbc = E.pair(j, k).part_matrix(cc);
        DenseChain d = make_dense(H, {&Y.sets[i], &Y.sets[j], &Y.sets[k]}, {&mab, &mac, &mbc});
        SubVerdict v;
        if (opt.gamma) v.homogeneous = homogeneous(relative_density(d), *opt.gamma);
        if (opt.eta) v.eta_ok = chain_quasirandomness(d).holds(*opt.eta);
        return cache[c].sub.emplace(key, v).first->second;
    };
    for (auto& cc : cache) cc.pairs.resize(std::size_t(t) * (t - 1) / 2);

    // verdict flags: good, homogeneous, eta, psi, dense
    auto verdict = [&](std::size_t c, const std::vector<uint32_t>& local) -> std::array<bool, 5> {
        const auto& E = P.edges[c];
        std::vector<int32_t> labels;
        labels.reserve(std::size_t(t) * (t - 1) / 2);
        for (uint32_t i = 0; i < t; ++i)
            for (uint32_t j = i + 1; j < t; ++j) labels.push_back(E.pair(i, j).at(local[i], local[j]));
        auto it = cache[c].tuple.find(labels);
        if (it != cache[c].tuple.end()) return it->second;
        Rat delta(1);
        for (uint32_t i = 0; i < t; ++i)
            for (uint32_t j = i + 1; j < t; ++j) delta *= pair_info(c, i, j)[labels[pair_index(i, j, t)]].density;
        Rat cap = psi(delta);
        bool psi_ok = true;
        for (uint32_t i = 0; i < t && psi_ok; ++i)
            for (uint32_t j = i + 1; j < t && psi_ok; ++j)
                psi_ok = pair_info(c, i, j)[labels[pair_index(i, j, t)]].alpha <= cap;
        bool hom = true, eta_ok = true;
        for (uint32_t i = 0; i < t; ++i)
            for (uint32_t j = i + 1; j < t; ++j)
                for (uint32_t k = j + 1; k < t; ++k) {
                    if (!opt.gamma && !opt.eta) continue;
                    const auto& sv = sub_verdict(c, i, j, k, labels[pair_index(i, j, t)], labels[pair_index(i, k, t)],
                                                 labels[pair_index(j, k, t)]);
                    hom = hom && sv.homogeneous;
                    eta_ok = eta_ok && sv.eta_ok;
                }
        bool dense = delta >= opt.delta_floor;
        bool good = hom && eta_ok && (!opt.require_psi || psi_ok);
        std::array<bool, 5> v{good, hom, eta_ok, psi_ok, dense};
        cache[c].tuple.emplace(std::move(labels), v);
        return v;
    };

    std::array<uint64_t, 5> hits{0, 0, 0, 0, 0};
    auto tally = [&](const std::array<bool, 5>& v) {
        for (int s = 0; s < 5; ++s) hits[s] += v[s];
    };

    if (whole <= Int(static_cast<unsigned long>(opt.exhaustive_limit))) {
        out.exhaustive = true;
        for (std::size_t c = 0; c < cyl.size(); ++c) {
            std::vector<uint32_t> idx(t, 0);
            bool done = false;
            while (!done) {
                tally(verdict(c, idx));
                ++out.tuples;
                uint32_t p = 0;
                while (p < t) {
                    if (++idx[p] < cyl[c].sets[p].size()) break;
                    idx[p] = 0;
                    ++p;
                }
                done = p == t;
            }
        }
    } else {
        out.exhaustive = false;
        // Locate sampled tuples: cylinder = AND of per-vertex cylinder masks.
        std::vector<Bitset> in(vs.n(), Bitset(cyl.size()));
        std::vector<std::vector<int32_t>> pos(cyl.size());
        for (std::size_t c = 0; c < cyl.size(); ++c) {
            pos[c].assign(vs.n(), -1);
            for (uint32_t p = 0; p < t; ++p)
                for (uint32_t k = 0; k < cyl[c].sets[p].size(); ++k) {
                    in[cyl[c].sets[p][k]].set(c);
                    pos[c][cyl[c].sets[p][k]] = int32_t(k);
                }
        }
        SplitMix64 rng(opt.seed);
        std::vector<uint32_t> tuple(t), local(t);
        for (uint64_t s = 0; s < opt.samples; ++s) {
            Bitset where(cyl.size());
            where.set_all();
            for (uint32_t p = 0; p < t; ++p) {
                tuple[p] = vs.part(p).begin + static_cast<uint32_t>(rng.below(vs.part(p).size));
                where &= in[tuple[p]];
            }
            auto hitc = where.indices();
            if (hitc.size() != 1) throw ValidationError("sampled tuple is not covered by exactly one cylinder");
            std::size_t c = hitc[0];
            for (uint32_t p = 0; p < t; ++p) local[p] = static_cast<uint32_t>(pos[c][tuple[p]]);
            tally(verdict(c, local));
            ++out.tuples;
        }
    }
    Int denom = out.exhaustive ? whole : Int(static_cast<unsigned long>(opt.samples));
    auto mass = [&](int s) { return ratio(Int(static_cast<unsigned long>(hits[s])), denom); };
    out.good_mass = mass(0);
    out.homogeneous_mass = mass(1);
    out.eta_mass = mass(2);
    out.psi_mass = mass(3);
    out.dense_mass = mass(4);
    return out;
}

TupleAudit eta_psi_audit(const ThreeGraph& H, const CylinderChainPartition& P, const Rat& eta,
                         const PolyFunction& psi) {
    TupleAuditOptions opt;
    opt.eta = eta;
    opt.require_psi = true;
    return tuple_audit(H, P, psi, opt);
}

HomogeneityAudit homogeneity_audit(const ThreeGraph& H, const CylinderChainPartition& P, const Rat& gamma,
                                   const PolyFunction& psi) {
    TupleAuditOptions opt;
    opt.gamma = gamma;
    opt.require_psi = false;
    auto ta = tuple_audit(H, P, psi, opt);
    HomogeneityAudit out;
    out.gamma = gamma;
    out.homogeneous_mass = ta.homogeneous_mass;
    out.crossing_homogeneous_mass = ta.homogeneous_mass;
    out.crossing_mass = 1;
    out.quasirandom_mass = ta.psi_mass;
    out.degenerate_mass = 0;
    out.sparse_mass = 0;
    out.convention = ta.exhaustive ? "t-tuples" : "t-tuples-sampled";
    return out;
}

// ----------------------------------------------------------------- markov

MarkovResult markov_split_check(const Chain& c, const std::array<std::vector<std::vector<uint32_t>>, 3>& vertex_classes,
                                const std::array<PairPartition, 3>& pair_parts, const Rat& gamma) {
    const auto& d = c.dense();
    std::array<std::vector<int32_t>, 3> cls;
    for (uint32_t p = 0; p < 3; ++p) {
        cls[p].assign(d.n[p], -1);
        for (uint32_t k = 0; k < vertex_classes[p].size(); ++k)
            for (auto v : vertex_classes[p][k]) {
                if (v >= d.n[p] || cls[p][v] >= 0) throw DomainError("vertex classes must partition each part");
                cls[p][v] = int32_t(k);
            }
        for (auto x : cls[p])
            if (x < 0) throw DomainError("vertex classes must partition each part");
    }
    const BitMatrix* hosts[3] = {&d.xy, &d.xz, &d.yz};
    for (int k = 0; k < 3; ++k)
        if (!(pair_parts[k].host() == *hosts[k])) throw DomainError("pair partitions must be hosted on the chain graph");

    Rat dens = relative_density(d);
    bool low = dens < gamma;
    if (!low && !(dens > 1 - gamma)) throw DomainError("markov check needs d(H|G) < gamma or d(H|G) > 1 - gamma");

    std::map<std::array<int32_t, 6>, std::pair<uint64_t, uint64_t>> cells;
    uint64_t T = 0;
    for (uint32_t x = 0; x < d.n[0]; ++x)
        for (auto y : d.xy.row(x).indices()) {
            Bitset tri = d.xz.row(x);
            tri &= d.yz.row(y);
            for (auto z : tri.indices()) {
                std::array<int32_t, 6> key{cls[0][x], cls[1][y], cls[2][z], pair_parts[0].at(x, y),
                                           pair_parts[1].at(x, z), pair_parts[2].at(y, z)};
                auto& cell = cells[key];
                ++cell.first;
                cell.second += d.hz(x, y).test(z);
                ++T;
            }
        }
    Int bad(0);
    for (const auto& [key, cell] : cells) {
        Rat dk = ratio(Int(static_cast<unsigned long>(cell.second)), Int(static_cast<unsigned long>(cell.first)));
        Rat side = low ? dk : Rat(1 - dk);
        if (side * side >= gamma) bad += static_cast<unsigned long>(cell.first);
    }
    MarkovResult out;
    out.gamma = gamma;
    out.mass_bad = ratio(bad, Int(static_cast<unsigned long>(T)));
    out.within_bound = out.mass_bad * out.mass_bad < gamma;
    if (mpz_perfect_square_p(gamma.get_num_mpz_t()) && mpz_perfect_square_p(gamma.get_den_mpz_t())) {
        Int a, b;
        mpz_sqrt(a.get_mpz_t(), gamma.get_num_mpz_t());
        mpz_sqrt(b.get_mpz_t(), gamma.get_den_mpz_t());
        out.bound = ratio(a, b);
    }
    return out;
}

}  // namespace regulab
