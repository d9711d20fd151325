#include <algorithm>

#include "regulab/engines.hpp"

namespace regulab {

namespace {

std::vector<uint32_t> positions_in(const std::vector<uint32_t>& outer, const std::vector<uint32_t>& inner) {
    std::vector<uint32_t> pos;
    pos.reserve(inner.size());
    for (auto v : inner)
        pos.push_back(static_cast<uint32_t>(std::lower_bound(outer.begin(), outer.end(), v) - outer.begin()));
    return pos;
}

// Labels cells of part `a` by the split and every other host cell by one extra label.
PairPartition embed(const PairPartition& old, int32_t a, const PairPartition& split) {
    PairPartition e = old;
    for (std::size_t k = 0; k < e.label.size(); ++k) {
        if (old.label[k] < 0) continue;
        e.label[k] = old.label[k] == a ? split.label[k] : static_cast<int32_t>(split.parts);
    }
    e.parts = split.parts + 1;
    return e;
}

struct CylinderStep {
    EdgePartition edges;
    uint32_t refined = 0, failures = 0;
};

// Refines every chain of the cylinder that is not eta-quasirandom.
CylinderStep refine_cylinder(const ThreeGraph& H, const VertexCylinder& Y, const EdgePartition& E, const Rat& eta,
                             const ConstantsProfile& r) {
    const uint32_t t = Y.t();
    CylinderStep out;
    std::vector<std::vector<PairPartition>> emb(E.pairs.size());
    for (uint32_t i = 0; i < t; ++i)
        for (uint32_t j = i + 1; j < t; ++j)
            for (uint32_t k = j + 1; k < t; ++k) {
                const auto& pij = E.pair(i, j);
                const auto& pik = E.pair(i, k);
                const auto& pjk = E.pair(j, k);
                for (uint32_t a = 0; a < pij.parts; ++a) {
                    BitMatrix ma = pij.part_matrix(int32_t(a));
                    for (uint32_t b = 0; b < pik.parts; ++b) {
                        BitMatrix mb = pik.part_matrix(int32_t(b));
                        for (uint32_t c = 0; c < pjk.parts; ++c) {
                            BitMatrix mc = pjk.part_matrix(int32_t(c));
                            DenseChain d = make_dense(H, {&Y.sets[i], &Y.sets[j], &Y.sets[k]}, {&ma, &mb, &mc});
                            if (triangle_count(d) == 0) continue;
                            auto z = [](std::size_t v) { return Int(static_cast<unsigned long>(v)); };
                            Rat delta = ratio(z(ma.count()) * z(mb.count()) * z(mc.count()),
                                              z(ma.rows() * ma.cols()) * z(mb.rows() * mb.cols()) *
                                                  z(mc.rows() * mc.cols()));
                            if (delta < r.delta_floor) continue;
                            if (chain_quasirandomness(d).holds(eta)) continue;
                            try {
                                auto split = refine_dense(d, *r.refine_gain, r.edge_part_cap);
                                emb[pair_index(i, j, t)].push_back(embed(pij, int32_t(a), split[0]));
                                emb[pair_index(i, k, t)].push_back(embed(pik, int32_t(b), split[1]));
                                emb[pair_index(j, k, t)].push_back(embed(pjk, int32_t(c), split[2]));
                                ++out.refined;
                            } catch (const RefinementFailure&) {
                                ++out.failures;
                            }
                        }
                    }
                }
            }
    out.edges = E;
    for (std::size_t p = 0; p < E.pairs.size(); ++p) {
        if (emb[p].empty()) continue;
        std::vector<const PairPartition*> all{&E.pairs[p]};
        for (const auto& e : emb[p]) all.push_back(&e);
        out.edges.pairs[p] = common_refinement(all);
        out.edges.pairs[p].compact();
    }
    return out;
}

}  // namespace

HyperResult hyper_cylinder_regularity(const ThreeGraph& H, const Rat& eta, const PolyFunction& psi,
                                      const ConstantsProfile& profile) {
    const auto& vs = H.vertices();
    const uint32_t t = vs.t();
    if (eta <= 0 || eta > 1) throw DomainError("eta must lie in (0, 1]");
    if (t < 3 || !H.requires_crossing()) throw DomainError("cylinder regularity needs a t-partite 3-graph, t >= 3");
    for (uint32_t p = 0; p < t; ++p)
        if (vs.part(p).size == 0) throw UndefinedDensityError("part '" + vs.part(p).name + "' is empty");
    ConstantsProfile r = profile.resolved(eta, t);
    if (r.name == "paper") {
        ScheduleReport rep = evaluate_paper_schedule(eta, t, psi);
        if (rep.refused) throw ScheduleSaturated(rep);
    }

    TupleAuditOptions opt;
    opt.eta = eta;
    opt.require_psi = true;
    opt.delta_floor = r.delta_floor;
    opt.exhaustive_limit = r.audit_exhaustive_limit;
    opt.samples = r.audit_samples;

    HyperResult res;
    res.profile = r;
    CylinderChainPartition P = CylinderChainPartition::trivial(vs);
    Rat q = q_partition(H, P);
    for (unsigned tau = 0;; ++tau) {
        TupleAudit audit = tuple_audit(H, P, psi, opt);
        TraceStep step;
        step.tau = tau;
        step.q = q;
        step.pv = P.vertex.cylinders.size();
        step.pe = P.max_edge_parts();
        step.good_mass = audit.good_mass;
        step.useful_mass = 1 - audit.good_mass;
        if (audit.good_mass >= 1 - eta) {
            step.action = "accept";
            res.trace.steps.push_back(step);
            res.audit = audit;
            break;
        }
        if (tau >= r.max_steps) {
            step.action = "abort";
            res.trace.steps.push_back(step);
            throw NonterminationError("cylinder regularity exceeded max_steps = " + std::to_string(r.max_steps),
                                      res.trace.to_json().dump());
        }

        const std::size_t m = P.vertex.cylinders.size();
        std::vector<CylinderStep> steps(m);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::size_t c = 0; c < m; ++c) steps[c] = refine_cylinder(H, P.vertex.cylinders[c], P.edges[c], eta, r);
        uint32_t refined = 0;
        for (const auto& s : steps) refined += s.refined, step.refinement_failures += s.failures;
        step.action = "refine";
        res.trace.steps.push_back(step);

        // Re-regularize each cylinder against its edge parts, then restrict the edge partitions.
        CylinderChainPartition next;
        next.vertex.vertices = vs;
        for (std::size_t c = 0; c < m; ++c) {
            const VertexCylinder& Y = P.vertex.cylinders[c];
            const EdgePartition& E = steps[c].edges;
            std::vector<PairLayer> layers;
            for (uint32_t i = 0; i < t; ++i)
                for (uint32_t j = i + 1; j < t; ++j) {
                    const auto& pp = E.pair(i, j);
                    for (uint32_t a = 0; a < pp.parts; ++a)
                        layers.push_back({i, j, pp.part_matrix(int32_t(a)), static_cast<uint32_t>(layers.size())});
                }
            // The audit wants every located graph psi(delta)-quasirandom, so regularize at least that finely.
            Rat alpha = r.graph_alpha;
            for (uint32_t i = 0; i < t; ++i)
                for (uint32_t j = i + 1; j < t; ++j)
                    for (uint32_t k = j + 1; k < t; ++k) {
                        auto dens = [](const PairPartition& pp, uint32_t rows, uint32_t cols) {
                            std::vector<Rat> d(pp.parts);
                            for (uint32_t a = 0; a < pp.parts; ++a)
                                d[a] = ratio(Int(static_cast<unsigned long>(pp.part_size(int32_t(a)))), Int(rows) * cols);
                            return d;
                        };
                        const uint32_t ni = uint32_t(Y.sets[i].size()), nj = uint32_t(Y.sets[j].size()),
                                       nk = uint32_t(Y.sets[k].size());
                        auto dij = dens(E.pair(i, j), ni, nj), dik = dens(E.pair(i, k), ni, nk),
                             djk = dens(E.pair(j, k), nj, nk);
                        for (const auto& a : dij)
                            for (const auto& b : dik)
                                for (const auto& c : djk) {
                                    Rat delta = a * b * c;
                                    if (delta > 0 && delta >= r.delta_floor) alpha = std::min(alpha, psi(delta));
                                }
                    }
            std::vector<VertexCylinder> sub;
            try {
                sub = regularize_cylinder(Y, layers, alpha, r);
            } catch (const NonterminationError& e) {
                throw NonterminationError(std::string("re-regularizing a cylinder: ") + e.what(),
                                          res.trace.to_json().dump());
            }
            for (auto& Z : sub) {
                EdgePartition ez;
                for (uint32_t p = 0; p < t; ++p) ez.sizes.push_back(static_cast<uint32_t>(Z.sets[p].size()));
                ez.pairs.resize(E.pairs.size());
                std::vector<std::vector<uint32_t>> pos(t);
                for (uint32_t p = 0; p < t; ++p) pos[p] = positions_in(Y.sets[p], Z.sets[p]);
                for (uint32_t i = 0; i < t; ++i)
                    for (uint32_t j = i + 1; j < t; ++j) {
                        ez.pair(i, j) = restrict_pair(E.pair(i, j), pos[i], pos[j]);
                        ez.pair(i, j).compact();
                    }
                next.vertex.cylinders.push_back(std::move(Z));
                next.edges.push_back(std::move(ez));
            }
        }
        Rat q_next = q_partition(H, next);
        Rat gain = q_next - q;
        if (gain < *r.q_gain)
            throw NonterminationError("q gain " + to_string(gain) + " below the profile gain " + to_string(*r.q_gain) +
                                          " (" + std::to_string(refined) + " chains refined, " +
                                          std::to_string(step.refinement_failures) + " refinement failures)",
                                      res.trace.to_json().dump());
        P = std::move(next);
        q = q_next;
    }
    res.partition = std::move(P);
    return res;
}

}  // namespace regulab
