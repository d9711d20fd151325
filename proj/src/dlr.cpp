#include <algorithm>
#include <map>

#include "regulab/engines.hpp"

namespace regulab {

namespace {

// Cylinder as position lists into the root's coordinate sets.
using Cyl = std::vector<std::vector<uint32_t>>;

Int volume(const Cyl& c) {
    Int v(1);
    for (const auto& s : c) v *= static_cast<unsigned long>(s.size());
    return v;
}

uint64_t edges_in(const BitMatrix& adj, const std::vector<uint32_t>& R, const std::vector<uint32_t>& C) {
    uint64_t e = 0;
    for (auto r : R)
        for (auto c : C) e += adj.test(r, c);
    return e;
}

Rat index_of(const std::vector<PairLayer>& layers, const std::vector<Cyl>& cyls, const Int& root_vol) {
    Rat idx(0);
    for (const auto& c : cyls) {
        Rat w = ratio(volume(c), root_vol);
        for (const auto& L : layers) {
            Int area = Int(static_cast<unsigned long>(c[L.i].size())) * c[L.j].size();
            Rat d = ratio(Int(static_cast<unsigned long>(edges_in(L.adj, c[L.i], c[L.j]))), area);
            idx += w * d * d;
        }
    }
    idx.canonicalize();
    return idx;
}

bool layer_qr(const PairLayer& L, const Cyl& c, const Rat& alpha) {
    return pair_quasirandomness(L.adj, c[L.i], c[L.j]).value <= alpha;
}

Cyl to_positions(const VertexCylinder& root) {
    Cyl c(root.t());
    for (uint32_t p = 0; p < root.t(); ++p) {
        c[p].resize(root.sets[p].size());
        for (uint32_t k = 0; k < c[p].size(); ++k) c[p][k] = k;
    }
    return c;
}

VertexCylinder to_global(const VertexCylinder& root, const Cyl& c) {
    VertexCylinder y;
    y.sets.resize(c.size());
    for (uint32_t p = 0; p < c.size(); ++p) {
        for (auto k : c[p]) y.sets[p].push_back(root.sets[p][k]);
        std::sort(y.sets[p].begin(), y.sets[p].end());
    }
    return y;
}

}  // namespace

Rat layered_index(const VertexCylinder& root, const std::vector<PairLayer>& layers,
                  const std::vector<VertexCylinder>& cylinders) {
    std::vector<Cyl> cyls;
    for (const auto& y : cylinders) {
        Cyl c(root.t());
        for (uint32_t p = 0; p < root.t(); ++p)
            for (auto v : y.sets[p])
                c[p].push_back(static_cast<uint32_t>(std::lower_bound(root.sets[p].begin(), root.sets[p].end(), v) -
                                                     root.sets[p].begin()));
        cyls.push_back(std::move(c));
    }
    return index_of(layers, cyls, root.volume());
}

std::vector<VertexCylinder> regularize_cylinder(const VertexCylinder& root, const std::vector<PairLayer>& layers,
                                                const Rat& alpha, const ConstantsProfile& profile,
                                                IterationTrace* trace) {
    if (alpha <= 0 || alpha > 1) throw DomainError("alpha must lie in (0, 1]");
    const uint32_t t = root.t();
    const Int root_vol = root.volume();
    uint32_t groups = 0;
    for (const auto& L : layers) groups = std::max(groups, L.group + 1);
    std::vector<Cyl> cyls{to_positions(root)};
    IterationTrace local;
    IterationTrace& tr = trace ? *trace : local;
    const Rat need = 1 - alpha / 2;

    for (unsigned tau = 0;; ++tau) {
        // Audit: per group, mass of cylinders on which every layer of the group is quasirandom.
        std::vector<std::vector<char>> qr(cyls.size(), std::vector<char>(layers.size(), 1));
#pragma omp parallel for schedule(dynamic, 1) collapse(2)
        for (std::size_t c = 0; c < cyls.size(); ++c)
            for (std::size_t l = 0; l < layers.size(); ++l) qr[c][l] = layer_qr(layers[l], cyls[c], alpha);
        std::vector<Int> good(groups, Int(0));
        for (std::size_t c = 0; c < cyls.size(); ++c) {
            std::vector<char> ok(groups, 1);
            for (std::size_t l = 0; l < layers.size(); ++l)
                if (!qr[c][l]) ok[layers[l].group] = 0;
            Int v = volume(cyls[c]);
            for (uint32_t g = 0; g < groups; ++g)
                if (ok[g]) good[g] += v;
        }
        Rat worst(1);
        for (uint32_t g = 0; g < groups; ++g) worst = std::min(worst, ratio(good[g], root_vol));
        Rat idx = index_of(layers, cyls, root_vol);
        TraceStep step;
        step.tau = tau;
        step.q = idx;
        step.pv = cyls.size();
        step.good_mass = worst;
        step.useful_mass = 1 - worst;
        if (worst >= need) {
            step.action = "accept";
            tr.steps.push_back(step);
            break;
        }
        if (tau >= profile.max_steps) {
            step.action = "abort";
            tr.steps.push_back(step);
            throw NonterminationError("cylinder regularity exceeded max_steps = " + std::to_string(profile.max_steps),
                                      tr.to_json().dump());
        }
        step.action = "refine";
        tr.steps.push_back(step);

        // Witness sets per cylinder and part, strongest first.
        std::vector<Cyl> next;
        bool changed = false;
        std::vector<std::vector<Cyl>> pieces(cyls.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::size_t c = 0; c < cyls.size(); ++c) {
            const Cyl& cy = cyls[c];
            std::vector<std::vector<std::pair<Rat, std::vector<uint32_t>>>> cuts(t);
            for (std::size_t l = 0; l < layers.size(); ++l) {
                if (qr[c][l]) continue;
                const auto& L = layers[l];
                BitMatrix sub(cy[L.i].size(), cy[L.j].size());
                for (uint32_t a = 0; a < cy[L.i].size(); ++a)
                    for (uint32_t b = 0; b < cy[L.j].size(); ++b)
                        if (L.adj.test(cy[L.i][a], cy[L.j][b])) sub.set(a, b);
                CutWitness w = find_cut_witness(sub, profile.witness_search, profile.exhaustive_side);
                auto proper = [](std::size_t k, std::size_t n) { return k > 0 && k < n; };
                if (proper(w.rows.size(), cy[L.i].size())) cuts[L.i].emplace_back(w.deviation, w.rows);
                if (proper(w.cols.size(), cy[L.j].size())) cuts[L.j].emplace_back(w.deviation, w.cols);
            }
            // Atoms of each part: positions grouped by membership in the kept cuts.
            std::vector<std::vector<std::vector<uint32_t>>> atoms(t);
            for (uint32_t p = 0; p < t; ++p) {
                auto& cp = cuts[p];
                std::stable_sort(cp.begin(), cp.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
                if (cp.size() > profile.witnesses_per_part) cp.resize(profile.witnesses_per_part);
                std::map<std::vector<char>, std::size_t> slot;
                for (uint32_t k = 0; k < cy[p].size(); ++k) {
                    std::vector<char> key(cp.size());
                    for (std::size_t s = 0; s < cp.size(); ++s)
                        key[s] = std::binary_search(cp[s].second.begin(), cp[s].second.end(), k);
                    auto [it, fresh] = slot.emplace(key, atoms[p].size());
                    if (fresh) atoms[p].emplace_back();
                    atoms[p][it->second].push_back(cy[p][k]);
                }
            }
            // Product of atoms.
            std::vector<Cyl> out{Cyl{}};
            for (uint32_t p = 0; p < t; ++p) {
                std::vector<Cyl> grown;
                for (const auto& partial : out)
                    for (const auto& atom : atoms[p]) {
                        Cyl g = partial;
                        g.push_back(atom);
                        grown.push_back(std::move(g));
                    }
                out = std::move(grown);
            }
            pieces[c] = std::move(out);
        }
        for (auto& ps : pieces) {
            if (ps.size() > 1) changed = true;
            for (auto& p : ps) next.push_back(std::move(p));
        }
        if (!changed)
            throw NonterminationError("cylinder regularity stalled: no witness splits a cylinder", tr.to_json().dump());
        Rat gain = index_of(layers, next, root_vol) - idx;
        if (gain < profile.index_gain)
            throw NonterminationError("cylinder regularity stalled: index gain " + to_string(gain) + " below " +
                                          to_string(profile.index_gain),
                                      tr.to_json().dump());
        cyls = std::move(next);
    }
    std::vector<VertexCylinder> out;
    for (const auto& c : cyls) out.push_back(to_global(root, c));
    return out;
}

VertexCylinderPartition dlr_cylinder_regularity(const std::vector<MultipartiteGraph>& graphs, const Rat& alpha,
                                                const ConstantsProfile& profile, IterationTrace* trace) {
    if (graphs.empty()) throw DomainError("need at least one graph");
    const auto& vs = graphs.front().vertices();
    for (const auto& g : graphs)
        if (!(g.vertices() == vs)) throw DomainError("graphs must share one partite vertex set");
    for (uint32_t p = 0; p < vs.t(); ++p)
        if (vs.part(p).size == 0) throw UndefinedDensityError("empty part");
    VertexCylinderPartition P = VertexCylinderPartition::trivial(vs);
    std::vector<PairLayer> layers;
    for (uint32_t g = 0; g < graphs.size(); ++g)
        for (uint32_t i = 0; i < vs.t(); ++i)
            for (uint32_t j = i + 1; j < vs.t(); ++j) layers.push_back({i, j, graphs[g].pair(i, j).adj, g});
    P.cylinders = regularize_cylinder(P.cylinders.front(), layers, alpha, profile, trace);
    return P;
}

std::vector<Rat> dlr_audit(const std::vector<MultipartiteGraph>& graphs, const VertexCylinderPartition& P,
                           const Rat& alpha) {
    const auto& vs = P.vertices;
    Int whole(1);
    for (uint32_t p = 0; p < vs.t(); ++p) whole *= vs.part(p).size;
    std::vector<Rat> out;
    for (const auto& g : graphs) {
        Int good(0);
        for (const auto& Y : P.cylinders) {
            bool ok = true;
            for (uint32_t i = 0; i < vs.t() && ok; ++i)
                for (uint32_t j = i + 1; j < vs.t() && ok; ++j)
                    ok = pair_quasirandomness(g, Y.sets[i], Y.sets[j]).value <= alpha;
            if (ok) good += Y.volume();
        }
        out.push_back(ratio(good, whole));
    }
    return out;
}

}  // namespace regulab
