#include "regulab/core.hpp"

#include <algorithm>
#include <unordered_set>

namespace regulab {

PartiteVertexSet::PartiteVertexSet(const std::vector<std::pair<std::string, uint32_t>>& parts) {
    if (parts.empty()) throw ValidationError("a vertex set needs at least one part");
    std::unordered_set<std::string> names;
    for (const auto& [name, size] : parts) {
        if (!names.insert(name).second) throw ValidationError("duplicate part name '" + name + "'");
        parts_.push_back(Part{name, n_, size});
        n_ += size;
    }
    owner_.resize(n_);
    for (uint32_t p = 0; p < parts_.size(); ++p)
        std::fill(owner_.begin() + parts_[p].begin, owner_.begin() + parts_[p].begin + parts_[p].size, p);
}

PartiteVertexSet PartiteVertexSet::sized(const std::vector<uint32_t>& sizes) {
    std::vector<std::pair<std::string, uint32_t>> named;
    for (std::size_t i = 0; i < sizes.size(); ++i) named.emplace_back("X" + std::to_string(i + 1), sizes[i]);
    return PartiteVertexSet(named);
}

std::vector<uint32_t> PartiteVertexSet::members(uint32_t p) const {
    std::vector<uint32_t> out(parts_[p].size);
    for (uint32_t k = 0; k < out.size(); ++k) out[k] = parts_[p].begin + k;
    return out;
}

MultipartiteGraph::MultipartiteGraph(PartiteVertexSet vs) : vs_(std::move(vs)) {
    uint32_t t = vs_.t();
    pairs_.resize(std::size_t(t) * (t - 1) / 2);
    for (uint32_t i = 0; i < t; ++i)
        for (uint32_t j = i + 1; j < t; ++j) {
            auto& b = pairs_[pair_index(i, j, t)];
            b.left = i;
            b.right = j;
            b.adj = BitMatrix(vs_.part(i).size, vs_.part(j).size);
        }
}

MultipartiteGraph MultipartiteGraph::complete(PartiteVertexSet vs) {
    MultipartiteGraph g(std::move(vs));
    for (auto& b : g.pairs_) b.adj.set_all();
    return g;
}

void MultipartiteGraph::add_edge(uint32_t u, uint32_t v) {
    if (u >= vs_.n() || v >= vs_.n()) throw ValidationError("edge endpoint out of range");
    uint32_t pu = vs_.part_of(u), pv = vs_.part_of(v);
    if (pu == pv) throw ValidationError("edge inside a part");
    if (pu > pv) {
        std::swap(u, v);
        std::swap(pu, pv);
    }
    pair(pu, pv).adj.set(vs_.local(u), vs_.local(v));
}

bool MultipartiteGraph::adjacent(uint32_t u, uint32_t v) const {
    uint32_t pu = vs_.part_of(u), pv = vs_.part_of(v);
    if (pu == pv) return false;
    if (pu > pv) {
        std::swap(u, v);
        std::swap(pu, pv);
    }
    return pair(pu, pv).adj.test(vs_.local(u), vs_.local(v));
}

std::size_t MultipartiteGraph::edge_count() const {
    std::size_t c = 0;
    for (const auto& b : pairs_) c += b.adj.count();
    return c;
}

std::vector<std::pair<uint32_t, uint32_t>> MultipartiteGraph::edges() const {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (const auto& b : pairs_)
        for (uint32_t r = 0; r < b.adj.rows(); ++r)
            for (auto c : b.adj.row(r).indices()) out.emplace_back(vs_.global(b.left, r), vs_.global(b.right, c));
    std::sort(out.begin(), out.end());
    return out;
}

Graph::Graph(PartiteVertexSet vs) : vs_(std::move(vs)), adj_(vs_.n(), vs_.n()) {}

void Graph::add_edge(uint32_t u, uint32_t v) {
    if (u >= n() || v >= n()) throw ValidationError("edge endpoint out of range");
    if (u == v) throw ValidationError("loop at vertex " + std::to_string(u));
    adj_.set(u, v);
    adj_.set(v, u);
}

std::vector<std::pair<uint32_t, uint32_t>> Graph::edges() const {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (uint32_t u = 0; u < n(); ++u)
        for (auto v : adj_.row(u).indices())
            if (u < v) out.emplace_back(u, v);
    return out;
}

MultipartiteGraph Graph::to_multipartite() const {
    MultipartiteGraph g(vs_);
    for (auto [u, v] : edges()) g.add_edge(u, v);
    return g;
}

ThreeGraph::ThreeGraph(PartiteVertexSet vs, bool require_crossing) : vs_(std::move(vs)), crossing_(require_crossing) {
    if (vs_.n() >= (1u << 21)) throw CapacityError("3-graphs are limited to 2^21 vertices");
}

uint64_t ThreeGraph::key(uint32_t u, uint32_t v, uint32_t w) const {
    return (uint64_t(u) << 42) | (uint64_t(v) << 21) | uint64_t(w);
}

static std::array<uint32_t, 3> sort3(uint32_t u, uint32_t v, uint32_t w) {
    std::array<uint32_t, 3> a{u, v, w};
    std::sort(a.begin(), a.end());
    return a;
}

void ThreeGraph::add(uint32_t u, uint32_t v, uint32_t w) {
    uint32_t n = vs_.n();
    if (u >= n || v >= n || w >= n) throw ValidationError("triple vertex out of range");
    auto a = sort3(u, v, w);
    if (a[0] == a[1] || a[1] == a[2]) throw ValidationError("triple with repeated vertex");
    if (crossing_) {
        uint32_t p0 = vs_.part_of(a[0]), p1 = vs_.part_of(a[1]), p2 = vs_.part_of(a[2]);
        if (p0 == p1 || p1 == p2 || p0 == p2)
            throw ValidationError("triple (" + std::to_string(a[0]) + "," + std::to_string(a[1]) + "," +
                                  std::to_string(a[2]) + ") has two vertices in one part");
    }
    set_.insert(key(a[0], a[1], a[2]));
}

bool ThreeGraph::contains(uint32_t u, uint32_t v, uint32_t w) const {
    auto a = sort3(u, v, w);
    return set_.count(key(a[0], a[1], a[2])) > 0;
}

std::vector<Triple> ThreeGraph::triples() const {
    std::vector<Triple> out;
    out.reserve(set_.size());
    const uint64_t m = (uint64_t(1) << 21) - 1;
    for (auto k : set_) out.push_back(Triple{uint32_t(k >> 42), uint32_t((k >> 21) & m), uint32_t(k & m)});
    std::sort(out.begin(), out.end());
    return out;
}

bool ThreeGraph::operator==(const ThreeGraph& o) const {
    return vs_ == o.vs_ && crossing_ == o.crossing_ && set_ == o.set_;
}

DenseChain make_dense(const ThreeGraph& H, const std::array<const std::vector<uint32_t>*, 3>& verts,
                      const std::array<const BitMatrix*, 3>& host) {
    DenseChain d;
    for (int k = 0; k < 3; ++k) d.n[k] = static_cast<uint32_t>(verts[k]->size());
    const auto& X = *verts[0];
    const auto& Y = *verts[1];
    const auto& Z = *verts[2];
    auto take = [](const BitMatrix* m, std::size_t r, std::size_t c) {
        if (m) return *m;
        BitMatrix b(r, c);
        b.set_all();
        return b;
    };
    d.xy = take(host[0], d.n[0], d.n[1]);
    d.xz = take(host[1], d.n[0], d.n[2]);
    d.yz = take(host[2], d.n[1], d.n[2]);
    d.complete_host = !host[0] && !host[1] && !host[2];
    d.h.assign(std::size_t(d.n[0]) * d.n[1], Bitset(d.n[2]));
    for (uint32_t x = 0; x < d.n[0]; ++x)
        for (uint32_t y = 0; y < d.n[1]; ++y) {
            if (!d.xy.test(x, y)) continue;
            Bitset cand = d.xz.row(x);
            cand &= d.yz.row(y);
            auto& out = d.h[std::size_t(x) * d.n[1] + y];
            for (auto z : cand.indices())
                if (H.contains(X[x], Y[y], Z[z])) out.set(z);
        }
    return d;
}

static void require_tripartite(const MultipartiteGraph& g) {
    if (g.t() != 3) throw DomainError("expected a tripartite graph, got t = " + std::to_string(g.t()));
}

static DenseChain dense_of(const MultipartiteGraph& g, const ThreeGraph& h) {
    std::array<std::vector<uint32_t>, 3> v;
    for (uint32_t p = 0; p < 3; ++p) v[p] = g.vertices().members(p);
    return make_dense(h, {&v[0], &v[1], &v[2]}, {&g.pair(0, 1).adj, &g.pair(0, 2).adj, &g.pair(1, 2).adj});
}

Chain::Chain(MultipartiteGraph graph, ThreeGraph hyper) : g_(std::move(graph)), h_(std::move(hyper)) {
    require_tripartite(g_);
    if (!(g_.vertices() == h_.vertices())) throw ValidationError("chain graph and 3-graph use different vertex sets");
    for (const auto& tr : h_.triples())
        if (!g_.adjacent(tr.a, tr.b) || !g_.adjacent(tr.a, tr.c) || !g_.adjacent(tr.b, tr.c))
            throw ValidationError("hyperedge (" + std::to_string(tr.a) + "," + std::to_string(tr.b) + "," +
                                  std::to_string(tr.c) + ") is not a triangle of the graph");
    d_ = dense_of(g_, h_);
}

Int triangle_count(const DenseChain& d) {
    uint64_t total = 0;
#pragma omp parallel for reduction(+ : total) schedule(dynamic, 4)
    for (uint32_t x = 0; x < d.n[0]; ++x)
        for (auto y : d.xy.row(x).indices()) total += Bitset::and_count(d.xz.row(x), d.yz.row(y));
    return Int(static_cast<unsigned long>(total));
}

Int hyper_count(const DenseChain& d) {
    uint64_t total = 0;
    for (const auto& b : d.h) total += b.count();
    return Int(static_cast<unsigned long>(total));
}

Int triangle_count(const MultipartiteGraph& g) {
    require_tripartite(g);
    DenseChain d;
    d.n = {g.vertices().part(0).size, g.vertices().part(1).size, g.vertices().part(2).size};
    d.xy = g.pair(0, 1).adj;
    d.xz = g.pair(0, 2).adj;
    d.yz = g.pair(1, 2).adj;
    return triangle_count(d);
}

Rat relative_density(const DenseChain& d) { return ratio(hyper_count(d), triangle_count(d)); }

Rat relative_density(const Chain& c) { return relative_density(c.dense()); }

Chain restrict_chain(const Chain& c, const std::array<std::vector<uint32_t>, 3>& sub_vertices) {
    const auto& vs = c.graph().vertices();
    MultipartiteGraph sub(vs);
    std::vector<char> keep(vs.n(), 0);
    for (uint32_t p = 0; p < 3; ++p)
        for (auto v : sub_vertices[p]) {
            if (v >= vs.n() || vs.part_of(v) != p) throw ContainmentError("sub-vertex set leaves its part");
            keep[v] = 1;
        }
    for (auto [u, v] : c.graph().edges())
        if (keep[u] && keep[v]) sub.add_edge(u, v);
    return restrict_chain(c, sub_vertices, sub);
}

Chain restrict_chain(const Chain& c, const std::array<std::vector<uint32_t>, 3>& sub_vertices,
                     const MultipartiteGraph& sub_edges) {
    const auto& vs = c.graph().vertices();
    if (!(sub_edges.vertices() == vs)) throw ContainmentError("sub-edge sets live on a different vertex set");
    std::vector<char> keep(vs.n(), 0);
    for (uint32_t p = 0; p < 3; ++p)
        for (auto v : sub_vertices[p]) {
            if (v >= vs.n() || vs.part_of(v) != p) throw ContainmentError("sub-vertex set leaves its part");
            keep[v] = 1;
        }
    for (auto [u, v] : sub_edges.edges()) {
        if (!c.graph().adjacent(u, v))
            throw ContainmentError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") is not in the chain");
        if (!keep[u] || !keep[v])
            throw ContainmentError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                   ") leaves the sub-vertex sets");
    }
    ThreeGraph h = ThreeGraph::partite(vs);
    for (const auto& tr : c.hyper().triples())
        if (sub_edges.adjacent(tr.a, tr.b) && sub_edges.adjacent(tr.a, tr.c) && sub_edges.adjacent(tr.b, tr.c))
            h.add(tr.a, tr.b, tr.c);
    return Chain(sub_edges, std::move(h));
}

Rat pair_density(const MultipartiteGraph& g, uint32_t i, uint32_t j) {
    if (i > j) std::swap(i, j);
    const auto& vs = g.vertices();
    if (vs.part(i).size == 0 || vs.part(j).size == 0)
        throw UndefinedDensityError("density of a pair with an empty part");
    return ratio(Int(static_cast<unsigned long>(g.pair(i, j).adj.count())),
                 Int(static_cast<unsigned long>(vs.part(i).size)) * vs.part(j).size);
}

Rat product_density(const MultipartiteGraph& g) {
    Rat r(1);
    for (uint32_t i = 0; i < g.t(); ++i)
        for (uint32_t j = i + 1; j < g.t(); ++j) r *= pair_density(g, i, j);
    for (uint32_t i = 0; i < g.t(); ++i)
        if (g.vertices().part(i).size == 0) throw UndefinedDensityError("product density with an empty part");
    return r;
}

}  // namespace regulab
