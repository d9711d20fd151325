// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "regulab/engines.hpp"
#include "regulab/io.hpp"
#include "regulab/vcdim.hpp"
#include "support.hpp"

using namespace regulab;
using namespace regulab::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

MultipartiteGraph two_blocks(uint32_t n) {
    MultipartiteGraph g(PartiteVertexSet::sized({n, n}));
    for (uint32_t a = 0; a < n; ++a)
        for (uint32_t b = 0; b < n; ++b)
            if ((a < n / 2) == (b < n / 2)) g.add_edge(a, n + b);
    return g;
}

ThreeGraph as_general(const ThreeGraph& h) {
    ThreeGraph g = ThreeGraph::general(PartiteVertexSet({{"V", h.vertices().n()}}));
    for (const auto& t : h.triples()) g.add(t.a, t.b, t.c);
    return g;
}

Int choose3(uint32_t t) { return Int(t) * (t - 1) * (t - 2) / 6; }

Int ceil_div(const Rat& x) {
    Int q = x.get_num() / x.get_den();
    if (q * x.get_den() < x.get_num()) q += 1;
    return q;
}

// -- 1 -------------------------------------------------------------------

Outcome kernels() {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    SplitMix64 rng(101);
    for (int k = 0; k < 200; ++k) {
        uint32_t r = 1 + uint32_t(rng.below(10)), c = 1 + uint32_t(rng.below(10));
        Rat p = rat(1 + long(rng.below(7)), 8);
        auto g = random_bipartite(r, c, p, rng.next());
        const BitMatrix& m = g.pair(0, 1).adj;
        Rat naive = naive_c4(m);
        o.require(pair_quasirandomness(m, Mode::fast).raw_sum == naive, "c4 fast != naive sum");
        o.require(pair_quasirandomness(m, Mode::naive).raw_sum == naive, "c4 naive mode != naive sum");
    }
    for (int k = 0; k < 50; ++k) {
        std::vector<uint32_t> sizes{1 + uint32_t(rng.below(6)), 1 + uint32_t(rng.below(6)), 1 + uint32_t(rng.below(6))};
        Chain ch = random_chain(sizes, rat(3, 4), rat(1, 2), rng.next());
        o.require(chain_quasirandomness(ch, Mode::fast).raw_sum == naive_oct(ch), "oct fast != naive sum");
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(s < 60, "over 60 s");
    o.detail = o.pass ? "200 c4 + 50 oct instances, " + std::to_string(s) + " s" : o.detail;
    return o;
}

// -- 2 -------------------------------------------------------------------

Outcome q_identities() {
    Outcome o;
    SplitMix64 rng(102);
    for (int k = 0; k < 200; ++k) {
        std::vector<uint32_t> sizes{1 + uint32_t(rng.below(6)), 1 + uint32_t(rng.below(6)), 1 + uint32_t(rng.below(6))};
        Chain ch = random_chain(sizes, rat(1 + long(rng.below(4)), 4), rat(long(rng.below(5)), 4), rng.next());
        Rat d = naive_density(ch);
        o.require(q_edge_partition(ch, EdgePartition::trivial(ch.graph())) == d * d, "trivial q != d^2");
        Rat q = q_edge_partition(ch, random_edge_partition(ch, 3, rng));
        o.require(q >= 0 && q <= 1, "q outside [0,1]");
    }
    if (o.pass) o.detail = "200 chains";
    return o;
}

// -- 3 -------------------------------------------------------------------

// Triangle mass of each (cylinder, part triple, coarse label triple) cell,
// recounted from the subcylinders that refine it.
bool triangle_mass_identity(const CylinderChainPartition& P, const CylinderChainPartition& R) {
    const auto owner = containing_cylinders(P.vertex, R.vertex);
    for (std::size_t c = 0; c < P.vertex.cylinders.size(); ++c) {
        const auto& Y = P.vertex.cylinders[c];
        const uint32_t t = Y.t();
        auto local = [&](uint32_t p, uint32_t v) {
            return uint32_t(std::lower_bound(Y.sets[p].begin(), Y.sets[p].end(), v) - Y.sets[p].begin());
        };
        for (uint32_t i = 0; i < t; ++i)
            for (uint32_t j = i + 1; j < t; ++j)
                for (uint32_t k = j + 1; k < t; ++k) {
                    const auto& pij = P.edges[c].pair(i, j);
                    const auto& pik = P.edges[c].pair(i, k);
                    const auto& pjk = P.edges[c].pair(j, k);
                    auto rest = [&](const VertexCylinder& Z) {
                        Int m = 1;
                        for (uint32_t l = 0; l < t; ++l)
                            if (l != i && l != j && l != k) m *= Int(static_cast<unsigned long>(Z.sets[l].size()));
                        return m;
                    };
                    auto tally = [&](const VertexCylinder& Z, std::map<std::array<int32_t, 3>, Int>& out) {
                        Int w = rest(Z);
                        for (auto x : Z.sets[i])
                            for (auto y : Z.sets[j])
                                for (auto z : Z.sets[k]) {
                                    uint32_t a = local(i, x), b = local(j, y), e = local(k, z);
                                    out[{pij.at(a, b), pik.at(a, e), pjk.at(b, e)}] += w;
                                }
                    };
                    std::map<std::array<int32_t, 3>, Int> whole, parts;
                    tally(Y, whole);
                    for (std::size_t r = 0; r < R.vertex.cylinders.size(); ++r)
                        if (owner[r] == int(c)) tally(R.vertex.cylinders[r], parts);
                    if (whole != parts) return false;
                }
    }
    return true;
}

Outcome q_monotone() {
    Outcome o;
    SplitMix64 rng(103);
    int pairs = 0;
    for (int k = 0; k < 250; ++k) {
        std::vector<uint32_t> sizes{2 + uint32_t(rng.below(4)), 2 + uint32_t(rng.below(4)), 2 + uint32_t(rng.below(4))};
        Chain ch = random_chain(sizes, rat(2, 3), rat(1, 2), rng.next());
        auto coarse = random_edge_partition(ch, 2, rng);
        auto fine = split_labels(coarse, rng);
        o.require(refines(coarse, fine), "edge split is not a refinement");
        o.require(q_edge_partition(ch, fine) >= q_edge_partition(ch, coarse), "edge refinement lowered q");
        ++pairs;
    }
    int identities = 0;
    for (int k = 0; k < 250; ++k) {
        uint32_t t = 3 + uint32_t(rng.below(2));
        std::vector<uint32_t> sizes(t);
        for (auto& s : sizes) s = 2 + uint32_t(rng.below(3));
        ThreeGraph h = random_partite_3graph(sizes, rat(1, 2), rng.next());
        auto P = random_cylinder_partition(h.vertices(), 3, 2, rng);
        auto Phat = P;
        for (int s = 0; s < 2; ++s) split_cylinder(Phat, rng.below(Phat.vertex.cylinders.size()), rng);
        o.require(refines(P, Phat), "vertex split is not a refinement");
        Rat q0 = q_partition(h, P), q1 = q_partition(h, Phat);
        o.require(q1 >= q0, "vertex refinement lowered q");
        if (k % 2 == 0 && identities < 100) {
            o.require(triangle_mass_identity(P, Phat), "triangle-mass identity broken");
            ++identities;
        } else {
            auto Pfine = Phat;
            for (auto& E : Pfine.edges) E = split_labels(E, rng);
            o.require(refines(Phat, Pfine), "edge split of cylinders is not a refinement");
            o.require(q_partition(h, Pfine) >= q1, "edge refinement of cylinders lowered q");
        }
        ++pairs;
    }
    if (o.pass) o.detail = std::to_string(pairs) + " refinement pairs, " + std::to_string(identities) + " identities";
    return o;
}

// -- 4 -------------------------------------------------------------------

Outcome venn() {
    Outcome o;
    SplitMix64 rng(104);
    for (int k = 0; k < 100; ++k) {
        uint32_t t = 2 + uint32_t(rng.below(3));
        std::vector<uint32_t> sizes(t);
        for (auto& s : sizes) s = 1 + uint32_t(rng.below(4));
        auto vs = PartiteVertexSet::sized(sizes);
        auto P = random_cylinder_partition(vs, 6, 2, rng);
        ChainPartition Q = venn_diagram(P);
        try {
            Q.validate();
        } catch (const Error&) {
            o.require(false, "invalid chain partition");
        }
        o.require(Int(Q.size()) <= Int(t) * (Int(1) << unsigned(P.vertex.cylinders.size())), "too many classes");
        for (const auto& Y : P.vertex.cylinders)
            for (uint32_t p = 0; p < t; ++p) {
                std::set<uint32_t> want(Y.sets[p].begin(), Y.sets[p].end()), got;
                for (const auto& cls : Q.classes) {
                    std::size_t in = 0;
                    for (auto v : cls) in += want.count(v);
                    o.require(in == 0 || in == cls.size(), "class straddles a cylinder");
                    if (in == cls.size()) got.insert(cls.begin(), cls.end());
                }
                o.require(got == want, "cylinder is not a union of classes");
            }
    }
    if (o.pass) o.detail = "100 partitions";
    return o;
}

// -- 5 -------------------------------------------------------------------

Outcome markov() {
    Outcome o;
    SplitMix64 rng(105);
    int checked = 0;
    for (Rat gamma : {rat(1, 25), rat(9, 100)}) {
        int here = 0;
        for (uint64_t seed = 1; here < 50 && seed < 5000; ++seed) {
            Chain ch = random_chain({6, 6, 6}, rat(3, 4), gamma / 2, seed * 7919 + 1);
            if (relative_density(ch) >= gamma) continue;
            std::array<std::vector<std::vector<uint32_t>>, 3> cls;
            for (auto& c : cls) {
                uint32_t k = 1 + uint32_t(rng.below(3));
                c.resize(k);
                for (uint32_t v = 0; v < 6; ++v) c[v % k].push_back(v);
            }
            std::array<PairPartition, 3> pp{PairPartition::trivial(6, 6, &ch.dense().xy),
                                            PairPartition::trivial(6, 6, &ch.dense().xz),
                                            PairPartition::trivial(6, 6, &ch.dense().yz)};
            for (auto& p : pp) p = split_labels(p, rng);
            auto r = markov_split_check(ch, cls, pp, gamma);
            o.require(r.within_bound, "bad mass reached sqrt(gamma)");
            o.require(r.mass_bad * r.mass_bad < gamma, "bad mass squared reached gamma");
            ++here;
        }
        o.require(here == 50, "not enough sparse chains drawn");
        checked += here;
    }
    if (o.pass) o.detail = std::to_string(checked) + " chains";
    return o;
}

// -- 6 and 7 -------------------------------------------------------------

struct EngineRuns {
    Outcome soundness, steps;
};

void check_steps(Outcome& o, unsigned steps, uint32_t t, const Rat& gain, const std::string& who) {
    o.require(Int(steps) <= ceil_div(Rat(choose3(t)) / gain), who + " exceeded C(t,3)/gain steps");
}

EngineRuns engines() {
    EngineRuns out;
    Outcome& o = out.soundness;
    Outcome& s = out.steps;
    auto start = std::chrono::steady_clock::now();
    const Rat eta = rat(1, 4);
    const PolyFunction psi(rat(1, 16), 3);
    const ConstantsProfile desk = ConstantsProfile::desk();
    unsigned total_refinements = 0;
    auto hyper = [&](const ThreeGraph& h, const Rat& e, const std::string& who) {
        try {
            auto res = hyper_cylinder_regularity(h, e, psi, desk);
            const Rat gain = *res.profile.q_gain;
            o.require(res.trace.q_nondecreasing(), who + ": q decreased");
            for (std::size_t k = 1; k < res.trace.steps.size(); ++k)
                o.require(res.trace.steps[k].q - res.trace.steps[k - 1].q >= gain, who + ": gain below profile");
            o.require(res.trace.refinements() <= res.profile.max_steps, who + ": step cap exceeded");
            o.require(eta_psi_audit(h, res.partition, e, psi).good_mass >= 1 - e, who + ": audit failed");
            check_steps(s, res.trace.refinements(), 3, gain, who);
            total_refinements += res.trace.refinements();
        } catch (const Error& ex) {
            o.require(false, who + ": " + ex.what());
        }
    };
    for (uint64_t seed = 1; seed <= 20; ++seed)
        hyper(random_partite_3graph({30, 30, 30}, rat(1, 2), seed), eta, "random seed " + std::to_string(seed));
    for (uint64_t seed = 1; seed <= 3; ++seed)
        hyper(link_structured_3graph(8, 0, seed), rat(1, 512), "link-structured seed " + std::to_string(seed));

    // planted blocks for the graph engines
    auto g = two_blocks(16);
    IterationTrace dt;
    auto P = dlr_cylinder_regularity({g}, rat(1, 32), desk, &dt);
    o.require(P.cylinders.size() > 1, "dlr kept the planted pair whole");
    o.require(dlr_audit({g}, P, rat(1, 32))[0] >= 1 - rat(1, 32), "dlr audit failed");
    o.require(dt.q_nondecreasing(), "dlr index decreased");
    // the graph engines index pair densities, so their bound has C(t,3) replaced by 1
    check_steps(s, dt.refinements(), 3, desk.index_gain, "dlr");

    auto vs = g.vertices();
    ChainPartition Q = ChainPartition::from_classes(vs, {vs.members(0), vs.members(1)});
    auto& pp = Q.edge(0, 1);
    for (uint32_t a = 0; a < 16; ++a)
        for (uint32_t b = 0; b < 16; ++b) pp.at(a, b) = g.pair(0, 1).adj.test(a, b) ? 0 : 1;
    pp.parts = 2;
    IterationTrace st;
    auto R = szemeredi_multi(Q, rat(1, 32), desk, &st);
    o.require(R.size() > 2, "szemeredi kept the planted pair whole");
    o.require(szemeredi_pair_audit(R, rat(1, 32)) >= 1 - rat(1, 32), "szemeredi audit failed");
    o.require(st.q_nondecreasing(), "szemeredi index decreased");
    check_steps(s, st.refinements(), 3, desk.index_gain, "szemeredi");

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < 600, "over 10 minutes");
    if (o.pass)
        o.detail = "20 random + 3 link-structured hyper runs (" + std::to_string(total_refinements) +
                   " refinements), dlr, szemeredi, " + std::to_string(secs) + " s";
    if (s.pass) s.detail = "all engine traces within bound";
    return out;
}

// -- 8 -------------------------------------------------------------------

Outcome constructions() {
    Outcome o;
    SplitMix64 rng(108);
    for (int k = 0; k < 50; ++k) {
        auto G = random_bipartite(1 + uint32_t(rng.below(6)), 1 + uint32_t(rng.below(6)), rat(1, 2), rng.next());
        auto cone = cone_hypergraph(G, 1 + uint32_t(rng.below(8)));
        o.require(vc2_dimension(cone).d <= 1, "cone with vc2 > 1");
    }
    o.require(vc2_dimension(make_vd(2)).d >= 2, "V_2 below 2");
    for (uint64_t seed = 1; seed <= 20; ++seed)
        o.require(vc2_dimension(random_link_hypergraph(5, 5, 6, seed), 2).d <= 1, "random link shatters K22");
    for (uint32_t n = 3; n <= 12; ++n) {
        ThreeGraph h = random_tournament_3graph(n, n * 31);
        for (uint32_t a = 0; a < n; ++a)
            for (uint32_t b = a + 1; b < n; ++b)
                for (uint32_t c = b + 1; c < n; ++c)
                    for (uint32_t d = c + 1; d < n; ++d)
                        o.require(h.contains(a, b, c) + h.contains(a, b, d) + h.contains(a, c, d) + h.contains(b, c, d) <= 2,
                                  "tournament 4-set with 3 edges");
    }
    const Int triples = Int(64) * 63 * 62 / 6;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        Rat d = ratio(Int(static_cast<unsigned long>(random_tournament_3graph(64, seed).size())), triples);
        Rat gap = d - rat(1, 4);
        if (gap < 0) gap = -gap;
        o.require(gap <= rat(1, 20), "tournament density off 1/4");
    }
    if (o.pass) o.detail = "cones, V_2, 20 random links, tournaments n<=12 and n=64";
    return o;
}

// -- 9 -------------------------------------------------------------------

Outcome homogeneous() {
    Outcome o;
    const Rat eta = rat(1, 4);
    const PolyFunction psi(rat(1, 16), 3);
    const auto desk = ConstantsProfile::desk();
    std::string worst;
    Rat low = 1;
    auto run = [&](const ThreeGraph& h, const std::string& who) {
        try {
            auto res = homogeneous_decomposition(h, 1, eta, psi, desk);
            low = std::min(low, res.audit.crossing_homogeneous_mass);
            o.require(res.audit.crossing_homogeneous_mass >= 1 - 2 * eta, who + ": homogeneous mass below 1-2eta");
        } catch (const Error& e) {
            o.require(false, who + ": " + e.what());
        }
    };
    for (uint64_t seed = 1; seed <= 3; ++seed)
        run(as_general(cone_hypergraph(random_bipartite(6, 6, rat(1, 2), seed), 6)), "cone " + std::to_string(seed));
    for (uint32_t cliques : {2u, 3u}) {
        const uint32_t n = 24;
        ThreeGraph h = ThreeGraph::general(PartiteVertexSet({{"V", n}}));
        auto block = [&](uint32_t v) { return v * cliques / n; };
        for (uint32_t a = 0; a < n; ++a)
            for (uint32_t b = a + 1; b < n; ++b)
                for (uint32_t c = b + 1; c < n; ++c)
                    if (block(a) == block(b) && block(b) == block(c)) h.add(a, b, c);
        run(h, std::to_string(cliques) + " cliques");
    }
    const Rat eps = rat(1, 5);
    for (uint64_t seed = 1; seed <= 3; ++seed) {
        const uint32_t n = 24;
        Graph g(PartiteVertexSet({{"V", n}}));
        SplitMix64 rng(seed);
        Bernoulli noise(rat(1, 25));
        for (uint32_t a = 0; a < n; ++a)
            for (uint32_t b = a + 1; b < n; ++b)
                if (((a < n / 2) == (b < n / 2)) != noise(rng)) g.add_edge(a, b);
        auto res = graph_homogeneous_decomposition(g, eps, desk);
        o.require(res.homogeneous_mass >= 1 - 2 * eps, "graph pair mass below 1-2eps");
        o.require(graph_pair_homogeneity(g, res.classes, eps) == res.homogeneous_mass, "graph mass recount differs");
    }
    if (o.pass) o.detail = "lowest 3-graph mass " + to_string(low);
    return o;
}

// -- 10 ------------------------------------------------------------------

bool fps_recount(const MultipartiteGraph& g, const FpsResult& r, const Rat& eps) {
    const auto& m = g.pair(0, 1).adj;
    const uint32_t nl = uint32_t(m.rows()), nr = uint32_t(m.cols());
    std::size_t covered = 0;
    for (const auto& part : r.left) {
        covered += part.size();
        for (auto u : part)
            for (auto v : part) {
                uint32_t diff = 0;
                for (uint32_t b = 0; b < nr; ++b) diff += m.test(u, b) != m.test(v, b);
                if (!(Rat(diff) < 2 * eps * nr)) return false;
            }
    }
    for (const auto& part : r.right) {
        covered += part.size();
        for (auto u : part)
            for (auto v : part) {
                uint32_t diff = 0;
                for (uint32_t a = 0; a < nl; ++a) diff += m.test(a, u) != m.test(a, v);
                if (!(Rat(diff) < 2 * eps * nl)) return false;
            }
    }
    return covered == nl + nr;
}

Outcome fps() {
    Outcome o;
    std::vector<MultipartiteGraph> graphs{half_graph(64)};
    SplitMix64 rng(110);
    for (int k = 0; k < 10; ++k) {
        // few neighbourhood types on each side plus sparse flips
        const uint32_t n = 40, types = 2 + uint32_t(rng.below(4));
        std::vector<uint32_t> lt(n), rt(n);
        for (auto& x : lt) x = uint32_t(rng.below(types));
        for (auto& x : rt) x = uint32_t(rng.below(types));
        std::vector<std::vector<bool>> pattern(types, std::vector<bool>(types));
        for (auto& row : pattern)
            for (auto&& cell : row) cell = rng.coin();
        MultipartiteGraph g(PartiteVertexSet::sized({n, n}));
        Bernoulli flip(rat(1, 50));
        for (uint32_t a = 0; a < n; ++a)
            for (uint32_t b = 0; b < n; ++b)
                if (pattern[lt[a]][rt[b]] != flip(rng)) g.add_edge(a, n + b);
        graphs.push_back(std::move(g));
    }
    for (const auto& g : graphs)
        for (Rat eps : {rat(1, 8), rat(1, 4)}) {
            auto r = fps_packing_partition(g, eps);
            o.require(fps_recount(g, r, eps), "neighbourhood guarantee fails on recount");
            o.require(fps_guarantee_holds(g, r, eps), "library guarantee check fails");
        }
    if (o.pass) o.detail = "half_graph(64) and 10 bounded-type graphs";
    return o;
}

// -- 11 ------------------------------------------------------------------

Outcome refusal() {
    Outcome o;
    const Rat eta = rat(1, 4);
    const PolyFunction psi(Rat(ratio(1, Int(1) << 100)), 28);
    auto rep = evaluate_paper_schedule(eta, 3, psi);
    o.require(rep.refused, "schedule not refused");
    o.require(rep.saturated_at.has_value() && *rep.saturated_at < 2, "no saturation before step 2");
    bool threw = false;
    try {
        hyper_cylinder_regularity(random_partite_3graph({4, 4, 4}, rat(1, 2), 1), eta, psi, ConstantsProfile::paper());
    } catch (const ScheduleSaturated&) {
        threw = true;
    }
    o.require(threw, "paper profile ran the engine");
    if (o.pass) o.detail = "saturated at step " + std::to_string(*rep.saturated_at);
    return o;
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Outcome()>>> plan;
    EngineRuns er;
    plan.emplace_back("kernel-oracle equivalence", kernels);
    plan.emplace_back("q identities", q_identities);
    plan.emplace_back("q monotonicity", q_monotone);
    plan.emplace_back("venn diagram", venn);
    plan.emplace_back("markov preservation", markov);
    plan.emplace_back("engine soundness", [&] {
        er = engines();
        return er.soundness;
    });
    plan.emplace_back("step-count bound", [&] { return er.steps; });
    plan.emplace_back("constructions", constructions);
    plan.emplace_back("homogeneous pipelines", homogeneous);
    plan.emplace_back("fps packing", fps);
    plan.emplace_back("paper-profile refusal", refusal);

    int failed = 0;
    for (std::size_t k = 0; k < plan.size(); ++k) {
        Outcome o;
        try {
            o = plan[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, plan[k].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
