#include <algorithm>
#include <map>

#include "regulab/engines.hpp"

namespace regulab {

PartiteVertexSet equitable_partition(uint32_t n, uint32_t t) {
    if (t == 0 || t > n) throw DomainError("equitable partition needs 1 <= t <= n");
    std::vector<std::pair<std::string, uint32_t>> parts;
    for (uint32_t p = 0; p < t; ++p) parts.emplace_back("P" + std::to_string(p), n / t + (p < n % t ? 1 : 0));
    return PartiteVertexSet(parts);
}

ThreeGraph crossing_part(const ThreeGraph& H, const PartiteVertexSet& parts) {
    if (parts.n() != H.vertices().n()) throw DomainError("partition and 3-graph have different vertex counts");
    ThreeGraph out = ThreeGraph::partite(parts);
    for (const auto& e : H.triples()) {
        uint32_t a = parts.part_of(e.a), b = parts.part_of(e.b), c = parts.part_of(e.c);
        if (a != b && a != c && b != c) out.add(e.a, e.b, e.c);
    }
    return out;
}

HomogeneousResult homogeneous_decomposition(const ThreeGraph& H, unsigned vc2_hint, const Rat& eta,
                                            const PolyFunction& psi, const ConstantsProfile& profile) {
    // The desk schedule does not depend on the VC2 bound; it only feeds the homogeneity threshold of the full schedule.
    (void)vc2_hint;
    const uint32_t n = H.vertices().n();
    if (n < 3) throw DomainError("homogeneous decomposition needs at least 3 vertices");
    const uint32_t t = std::min(std::max<uint32_t>(profile.parts, 3), n);
    HomogeneousResult res;
    res.t = t;
    res.profile = profile.resolved(eta, t);
    const ConstantsProfile& r = res.profile;
    PartiteVertexSet vs = equitable_partition(n, t);
    ThreeGraph Hc = crossing_part(H, vs);

    HyperResult hr = hyper_cylinder_regularity(Hc, eta, psi, r);
    res.trace = hr.trace;
    TupleAuditOptions opt;
    opt.gamma = *r.gamma;
    opt.require_psi = false;
    opt.exhaustive_limit = r.audit_exhaustive_limit;
    opt.samples = r.audit_samples;
    res.cylinder_audit = tuple_audit(Hc, hr.partition, psi, opt);

    ChainPartition Q = szemeredi_multi(venn_diagram(hr.partition), r.graph_alpha, r);
    res.audit = homogeneity_audit(H, Q, *r.gamma, psi, eta / 9);
    res.pair_mass = szemeredi_pair_audit(Q, r.graph_alpha);
    res.partition = std::move(Q);
    return res;
}

Rat graph_pair_homogeneity(const Graph& G, const std::vector<std::vector<uint32_t>>& classes, const Rat& eps) {
    const uint32_t n = G.n();
    auto hom = [&](const Rat& d) { return d <= eps || d >= 1 - eps; };
    Int good(0);
    for (std::size_t p = 0; p < classes.size(); ++p) {
        const auto& A = classes[p];
        Int inside(0);
        for (std::size_t x = 0; x < A.size(); ++x)
            for (std::size_t y = x + 1; y < A.size(); ++y) inside += G.adjacent(A[x], A[y]);
        Int pairs = Int(static_cast<unsigned long>(A.size())) * (A.size() - (A.empty() ? 0 : 1)) / 2;
        if (pairs > 0 && hom(ratio(inside, pairs))) good += pairs;
        for (std::size_t q = p + 1; q < classes.size(); ++q) {
            const auto& B = classes[q];
            Int e(0);
            for (auto u : A)
                for (auto v : B) e += G.adjacent(u, v);
            Int area = Int(static_cast<unsigned long>(A.size())) * B.size();
            if (area > 0 && hom(ratio(e, area))) good += area;
        }
    }
    Int all = Int(n) * (n ? n - 1 : 0) / 2;
    return all == 0 ? Rat(1) : ratio(good, all);
}

GraphHomogeneousResult graph_homogeneous_decomposition(const Graph& G, const Rat& eps,
                                                       const ConstantsProfile& profile) {
    if (eps <= 0 || eps > 1) throw DomainError("eps must lie in (0, 1]");
    const uint32_t n = G.n();
    if (n == 0) throw DomainError("empty graph");
    Int c;
    mpz_cdiv_q(c.get_mpz_t(), eps.get_den_mpz_t(), eps.get_num_mpz_t());
    GraphHomogeneousResult res;
    res.t = static_cast<uint32_t>(std::min<unsigned long>(std::max<unsigned long>(c.get_ui(), 2), n));
    PartiteVertexSet vs = equitable_partition(n, res.t);
    MultipartiteGraph Gm(vs);
    for (auto [u, v] : G.edges())
        if (vs.part_of(u) != vs.part_of(v)) Gm.add_edge(u, v);
    VertexCylinderPartition P = dlr_cylinder_regularity({Gm}, eps * eps, profile, &res.trace);
    res.cylinders = P.cylinders.size();
    // Vertex Venn diagram: per part, vertices grouped by the cylinders containing them.
    for (uint32_t p = 0; p < vs.t(); ++p) {
        std::map<std::vector<char>, std::size_t> slot;
        for (auto v : vs.members(p)) {
            std::vector<char> key(P.cylinders.size());
            for (std::size_t c2 = 0; c2 < P.cylinders.size(); ++c2) {
                const auto& s = P.cylinders[c2].sets[p];
                key[c2] = std::binary_search(s.begin(), s.end(), v);
            }
            auto [it, fresh] = slot.emplace(key, res.classes.size());
            if (fresh) res.classes.emplace_back();
            res.classes[it->second].push_back(v);
        }
    }
    res.homogeneous_mass = graph_pair_homogeneity(G, res.classes, eps);
    return res;
}

namespace {

// Greedy eps*n-separated centers over rows, scanned in ascending order.
void pack_side(const BitMatrix& m, const Rat& eps, std::vector<std::vector<uint32_t>>& parts,
               std::vector<uint32_t>& centers) {
    const Int n(static_cast<unsigned long>(m.cols()));
    auto far = [&](uint32_t u, uint32_t v) {
        Bitset d = m.row(u);
        const Bitset& w = m.row(v);
        for (std::size_t k = 0; k < d.words(); ++k) d.data()[k] ^= w.data()[k];
        // |N(u) xor N(v)| >= eps * n, exactly.
        return Int(static_cast<unsigned long>(d.count())) * eps.get_den() >= eps.get_num() * n;
    };
    for (uint32_t v = 0; v < m.rows(); ++v) {
        bool separated = true;
        for (auto c : centers)
            if (!far(v, c)) {
                separated = false;
                break;
            }
        if (separated) centers.push_back(v);
    }
    parts.assign(centers.size(), {});
    for (uint32_t v = 0; v < m.rows(); ++v)
        for (std::size_t k = 0; k < centers.size(); ++k)
            if (!far(v, centers[k])) {
                parts[k].push_back(v);
                break;
            }
}

bool side_ok(const BitMatrix& m, const std::vector<std::vector<uint32_t>>& parts, const Rat& eps) {
    const Int n(static_cast<unsigned long>(m.cols()));
    for (const auto& part : parts)
        for (std::size_t a = 0; a < part.size(); ++a)
            for (std::size_t b = a + 1; b < part.size(); ++b) {
                Bitset d = m.row(part[a]);
                const Bitset& w = m.row(part[b]);
                for (std::size_t k = 0; k < d.words(); ++k) d.data()[k] ^= w.data()[k];
                if (Int(static_cast<unsigned long>(d.count())) * eps.get_den() >= 2 * eps.get_num() * n) return false;
            }
    return true;
}

}  // namespace

FpsResult fps_packing_partition(const MultipartiteGraph& G, const Rat& eps) {
    if (G.t() != 2) throw DomainError("packing partition needs a bipartite graph");
    if (G.vertices().part(0).size == 0 || G.vertices().part(1).size == 0) throw DomainError("empty side");
    if (eps <= 0) throw DomainError("eps must be positive");
    FpsResult r;
    const BitMatrix& adj = G.pair(0, 1).adj;
    pack_side(adj, eps, r.left, r.left_centers);
    pack_side(adj.transposed(), eps, r.right, r.right_centers);
    return r;
}

bool fps_guarantee_holds(const MultipartiteGraph& G, const FpsResult& r, const Rat& eps) {
    const BitMatrix& adj = G.pair(0, 1).adj;
    auto covers = [](const std::vector<std::vector<uint32_t>>& parts, std::size_t n) {
        std::vector<int> seen(n, 0);
        for (const auto& p : parts)
            for (auto v : p) {
                if (v >= n || seen[v]) return false;
                seen[v] = 1;
            }
        return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
    };
    return covers(r.left, adj.rows()) && covers(r.right, adj.cols()) && side_ok(adj, r.left, eps) &&
           side_ok(adj.transposed(), r.right, eps);
}

}  // namespace regulab
