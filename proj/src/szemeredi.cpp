#include <algorithm>
#include <map>
#include <tuple>

#include "regulab/engines.hpp"

namespace regulab {

namespace {

Int csize(const std::vector<uint32_t>& c) { return Int(static_cast<unsigned long>(c.size())); }

// Classes refined from a fixed root partition; edges are always restrictions of the root's.
struct Refined {
    const ChainPartition* root;
    std::vector<std::vector<uint32_t>> classes;
    std::vector<uint32_t> parent;
    std::vector<std::vector<uint32_t>> pos;  // positions inside the parent class

    ChainPartition build() const {
        ChainPartition Q = ChainPartition::from_classes(root->vertices, classes);
        const uint32_t m = Q.size();
        for (uint32_t p = 0; p < m; ++p)
            for (uint32_t q = p + 1; q < m; ++q) {
                if (parent[p] == parent[q]) continue;
                // Parents keep their order, so parent[p] < parent[q].
                Q.edge(p, q) = restrict_pair(root->edge(parent[p], parent[q]), pos[p], pos[q]);
                Q.edge(p, q).compact();
            }
        return Q;
    }
};

// Edge index of the root's edge parts over the refined classes.
Rat edge_index(const Refined& R, const ChainPartition& Q) {
    const uint32_t m = Q.size();
    Int n2 = Int(R.root->vertices.n()) * R.root->vertices.n();
    Rat idx(0);
    for (uint32_t p = 0; p < m; ++p)
        for (uint32_t q = p + 1; q < m; ++q) {
            if (R.parent[p] == R.parent[q]) continue;
            const auto& pp = Q.edge(p, q);
            Int area = csize(Q.classes[p]) * csize(Q.classes[q]);
            std::vector<unsigned long> cnt(pp.parts, 0);
            for (auto l : pp.label) ++cnt[l];
            Rat s(0);
            for (auto c : cnt) s += Rat(Int(c) * c, area * area);
            idx += Rat(area, n2) * s;
        }
    idx.canonicalize();
    return idx;
}

}  // namespace

Rat szemeredi_pair_audit(const ChainPartition& Q, const Rat& alpha) {
    const uint32_t m = Q.size();
    Int good(0), all(0);
    for (uint32_t p = 0; p < m; ++p)
        for (uint32_t q = p + 1; q < m; ++q) {
            const auto& pp = Q.edge(p, q);
            all += csize(Q.classes[p]) * csize(Q.classes[q]);
            for (uint32_t a = 0; a < pp.parts; ++a) {
                BitMatrix bm = pp.part_matrix(int32_t(a));
                if (pair_quasirandomness(bm).holds(alpha)) good += static_cast<unsigned long>(bm.count());
            }
        }
    return all == 0 ? Rat(1) : ratio(good, all);
}

ChainPartition szemeredi_multi(const ChainPartition& Q0, const Rat& alpha, const ConstantsProfile& profile,
                               IterationTrace* trace) {
    if (alpha <= 0 || alpha > 1) throw DomainError("alpha must lie in (0, 1]");
    Q0.validate();
    IterationTrace local;
    IterationTrace& tr = trace ? *trace : local;
    Refined R{&Q0, Q0.classes, {}, {}};
    for (uint32_t p = 0; p < Q0.size(); ++p) {
        R.parent.push_back(p);
        std::vector<uint32_t> all(Q0.classes[p].size());
        for (uint32_t k = 0; k < all.size(); ++k) all[k] = k;
        R.pos.push_back(std::move(all));
    }
    ChainPartition Q = Q0;
    for (unsigned tau = 0;; ++tau) {
        Rat mass = szemeredi_pair_audit(Q, alpha);
        Rat idx = edge_index(R, Q);
        TraceStep step;
        step.tau = tau;
        step.q = idx;
        step.pv = Q.size();
        step.pe = Q.max_edge_parts();
        step.good_mass = mass;
        step.useful_mass = 1 - mass;
        if (mass >= 1 - alpha) {
            step.action = "accept";
            tr.steps.push_back(step);
            return Q;
        }
        if (tau >= profile.max_steps) {
            step.action = "abort";
            tr.steps.push_back(step);
            throw NonterminationError("pair regularity exceeded max_steps = " + std::to_string(profile.max_steps),
                                      tr.to_json().dump());
        }
        step.action = "refine";
        tr.steps.push_back(step);

        // Witness cuts per class, as local index lists.
        const uint32_t m = Q.size();
        std::vector<std::vector<std::pair<Rat, std::vector<uint32_t>>>> cuts(m);
        std::vector<std::pair<uint32_t, uint32_t>> jobs;
        for (uint32_t p = 0; p < m; ++p)
            for (uint32_t q = p + 1; q < m; ++q) jobs.emplace_back(p, q);
        std::vector<std::vector<std::tuple<uint32_t, Rat, std::vector<uint32_t>>>> found(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            auto [p, q] = jobs[k];
            const auto& pp = Q.edge(p, q);
            for (uint32_t a = 0; a < pp.parts; ++a) {
                BitMatrix bm = pp.part_matrix(int32_t(a));
                if (pair_quasirandomness(bm).holds(alpha)) continue;
                CutWitness w = find_cut_witness(bm, profile.witness_search, profile.exhaustive_side);
                if (!w.rows.empty() && w.rows.size() < pp.rows) found[k].emplace_back(p, w.deviation, w.rows);
                if (!w.cols.empty() && w.cols.size() < pp.cols) found[k].emplace_back(q, w.deviation, w.cols);
            }
        }
        for (auto& f : found)
            for (auto& [cls, dev, set] : f) cuts[cls].emplace_back(dev, std::move(set));

        Refined next{&Q0, {}, {}, {}};
        bool changed = false;
        for (uint32_t p = 0; p < m; ++p) {
            auto& cp = cuts[p];
            std::stable_sort(cp.begin(), cp.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
            if (cp.size() > profile.witnesses_per_part) cp.resize(profile.witnesses_per_part);
            std::map<std::vector<char>, std::size_t> slot;
            const std::size_t first = next.classes.size();
            for (uint32_t k = 0; k < Q.classes[p].size(); ++k) {
                std::vector<char> key(cp.size());
                for (std::size_t s = 0; s < cp.size(); ++s)
                    key[s] = std::binary_search(cp[s].second.begin(), cp[s].second.end(), k);
                auto [it, fresh] = slot.emplace(key, next.classes.size());
                if (fresh) {
                    next.classes.emplace_back();
                    next.parent.push_back(R.parent[p]);
                    next.pos.emplace_back();
                }
                next.classes[it->second].push_back(Q.classes[p][k]);
                next.pos[it->second].push_back(R.pos[p][k]);
            }
            if (next.classes.size() - first > 1) changed = true;
        }
        if (!changed)
            throw NonterminationError("pair regularity stalled: no witness splits a class", tr.to_json().dump());
        ChainPartition Qn = next.build();
        Rat gain = edge_index(next, Qn) - idx;
        if (gain < profile.index_gain)
            throw NonterminationError("pair regularity stalled: index gain " + to_string(gain) + " below " +
                                          to_string(profile.index_gain),
                                      tr.to_json().dump());
        R = std::move(next);
        Q = std::move(Qn);
    }
}

}  // namespace regulab
