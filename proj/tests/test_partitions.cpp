#include <gtest/gtest.h>

#include <set>

#include "regulab/generators.hpp"
#include "regulab/partition_io.hpp"
#include "regulab/partitions.hpp"
#include "support.hpp"

using namespace regulab;
using namespace regulab::testing;

namespace {

Chain complete_chain(const ThreeGraph& h) { return Chain(MultipartiteGraph::complete(h.vertices()), h); }

// q_cylinder oracle: sum over part triples of the naive q of the located chain.
Rat naive_q_cylinder(const ThreeGraph& H, const VertexCylinder& Y, const EdgePartition& pe) {
    const uint32_t t = Y.t();
    Rat total = 0;
    for (uint32_t i = 0; i < t; ++i)
        for (uint32_t j = i + 1; j < t; ++j)
            for (uint32_t k = j + 1; k < t; ++k) {
                const auto &X = Y.sets[i], &Yv = Y.sets[j], &Z = Y.sets[k];
                std::map<std::array<int32_t, 3>, std::pair<Int, Int>> cells;
                Int T = 0;
                for (uint32_t x = 0; x < X.size(); ++x)
                    for (uint32_t y = 0; y < Yv.size(); ++y)
                        for (uint32_t z = 0; z < Z.size(); ++z) {
                            auto& c = cells[{pe.pair(i, j).at(x, y), pe.pair(i, k).at(x, z), pe.pair(j, k).at(y, z)}];
                            c.first += 1;
                            if (H.contains(X[x], Yv[y], Z[z])) c.second += 1;
                            T += 1;
                        }
                Rat q = 0;
                for (const auto& [key, c] : cells) q += ratio(c.second, c.first) * ratio(c.second, c.first) * Rat(c.first);
                total += ratio(q.get_num(), q.get_den() * T);
            }
    return total;
}

}  // namespace

TEST(QEdgePartition, TrivialIsSquaredDensity) {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        Chain ch = random_chain({4, 5, 3}, rat(2, 3), rat(1, 3), seed);
        Rat d = relative_density(ch);
        EXPECT_EQ(q_edge_partition(ch, EdgePartition::trivial(ch.graph())), d * d);
    }
}

TEST(QEdgePartition, TriangleFreeIsZero) {
    auto vs = PartiteVertexSet::sized({3, 3, 3});
    MultipartiteGraph g = MultipartiteGraph::complete(vs);
    g.pair(1, 2).adj = BitMatrix(3, 3);
    Chain ch(g, ThreeGraph::partite(vs));
    SplitMix64 rng(1);
    EXPECT_EQ(q_edge_partition(ch, random_edge_partition(ch, 3, rng)), 0);
}

TEST(QEdgePartition, RandomSplitsMatchOracle) {
    SplitMix64 rng(2);
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        Chain ch = random_chain({4, 4, 4}, rat(3, 4), rat(1, 2), seed);
        EdgePartition pe = random_edge_partition(ch, 2, rng);
        Rat fast = q_edge_partition(ch, pe, Mode::fast);
        EXPECT_EQ(fast, q_edge_partition(ch, pe, Mode::naive));
        EXPECT_EQ(fast, naive_q(ch, pe));
        EXPECT_GE(fast, 0);
        EXPECT_LE(fast, 1);
    }
}

TEST(QEdgePartition, RefinementNeverDecreases) {
    SplitMix64 rng(3);
    for (uint64_t seed = 1; seed <= 30; ++seed) {
        Chain ch = random_chain({4, 5, 4}, rat(3, 4), rat(1, 2), seed);
        EdgePartition coarse = random_edge_partition(ch, 2, rng);
        EdgePartition fine = split_labels(coarse, rng);
        ASSERT_TRUE(refines(coarse, fine));
        EXPECT_GE(q_edge_partition(ch, fine), q_edge_partition(ch, coarse));
    }
}

TEST(QCylinder, ThreePartsEqualsEdgePartition) {
    SplitMix64 rng(4);
    ThreeGraph h = random_partite_3graph({3, 4, 3}, rat(1, 2), 5);
    Chain ch = complete_chain(h);
    EdgePartition pe = random_edge_partition(ch, 3, rng);
    VertexCylinder Y;
    for (uint32_t p = 0; p < 3; ++p) Y.sets.push_back(h.vertices().members(p));
    EXPECT_EQ(q_cylinder(h, Y, pe), q_edge_partition(ch, pe));
}

TEST(QCylinder, NoCrossingTriplesIsZeroAndFourPartsSum) {
    SplitMix64 rng(6);
    ThreeGraph empty = ThreeGraph::partite(PartiteVertexSet::sized({2, 2, 2, 2}));
    auto P = random_cylinder_partition(empty.vertices(), 1, 2, rng);
    EXPECT_EQ(q_cylinder(empty, P.vertex.cylinders[0], P.edges[0]), 0);
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        ThreeGraph h = random_partite_3graph({3, 2, 3, 2}, rat(1, 2), seed);
        auto R = random_cylinder_partition(h.vertices(), 1, 2, rng);
        EXPECT_EQ(q_cylinder(h, R.vertex.cylinders[0], R.edges[0]),
                  naive_q_cylinder(h, R.vertex.cylinders[0], R.edges[0]));
    }
}

TEST(QPartition, TrivialIsSquaredDensityOfComplete) {
    ThreeGraph h = random_partite_3graph({4, 4, 4}, rat(1, 3), 9);
    Rat d = relative_density(complete_chain(h));
    EXPECT_EQ(q_partition(h, CylinderChainPartition::trivial(h.vertices())), d * d);
    ThreeGraph e = ThreeGraph::partite(h.vertices());
    EXPECT_EQ(q_partition(e, CylinderChainPartition::trivial(h.vertices())), 0);
}

TEST(QPartition, FastMatchesNaiveAndIsBounded) {
    SplitMix64 rng(10);
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        ThreeGraph h = random_partite_3graph({6, 6, 6}, rat(1, 2), seed);
        auto P = random_cylinder_partition(h.vertices(), 5, 3, rng);
        P.validate();
        Rat fast = q_partition(h, P, Mode::fast);
        EXPECT_EQ(fast, q_partition(h, P, Mode::naive));
        Rat oracle = 0;
        Int whole = 216;
        for (std::size_t c = 0; c < P.vertex.cylinders.size(); ++c)
            oracle += naive_q_cylinder(h, P.vertex.cylinders[c], P.edges[c]) *
                      ratio(P.vertex.cylinders[c].volume(), whole);
        EXPECT_EQ(fast, oracle);
        EXPECT_GE(fast, 0);
        EXPECT_LE(fast, 1);
    }
}

TEST(QPartition, VertexThenEdgeRefinementMonotone) {
    SplitMix64 rng(12);
    for (uint64_t seed = 1; seed <= 15; ++seed) {
        ThreeGraph h = random_partite_3graph({4, 3, 4, 3}, rat(1, 2), seed);
        auto P = random_cylinder_partition(h.vertices(), 3, 2, rng);
        auto Phat = P;
        for (int k = 0; k < 3; ++k) split_cylinder(Phat, rng.below(Phat.vertex.cylinders.size()), rng);
        Phat.validate();
        ASSERT_TRUE(refines(P, Phat));
        Rat q0 = q_partition(h, P), q1 = q_partition(h, Phat);
        EXPECT_GE(q1, q0);
        auto Pfine = Phat;
        for (auto& E : Pfine.edges) E = split_labels(E, rng);
        ASSERT_TRUE(refines(Phat, Pfine));
        EXPECT_GE(q_partition(h, Pfine), q1);
        EXPECT_LE(q_partition(h, Pfine), 4);  // C(4, 3)
    }
}

TEST(Refines, SelfAndSingletons) {
    SplitMix64 rng(13);
    ThreeGraph h = random_partite_3graph({3, 3, 3}, rat(1, 2), 1);
    auto P = random_cylinder_partition(h.vertices(), 4, 2, rng);
    EXPECT_TRUE(refines(P, P));
    EXPECT_TRUE(refines(P.vertex, P.vertex));
    PairPartition coarse = PairPartition::trivial(3, 4);
    PairPartition singles = coarse;
    for (uint32_t k = 0; k < singles.label.size(); ++k) singles.label[k] = int32_t(k);
    singles.parts = 12;
    EXPECT_TRUE(refines(coarse, singles));
    EXPECT_FALSE(refines(singles, coarse));
}

TEST(Refines, CrossingSplitsAreIncomparable) {
    PairPartition rows_split = PairPartition::trivial(2, 2), cols_split = PairPartition::trivial(2, 2);
    rows_split.at(1, 0) = rows_split.at(1, 1) = 1;
    rows_split.parts = 2;
    cols_split.at(0, 1) = cols_split.at(1, 1) = 1;
    cols_split.parts = 2;
    EXPECT_FALSE(refines(rows_split, cols_split));
    EXPECT_FALSE(refines(cols_split, rows_split));

    auto vs = PartiteVertexSet::sized({2, 2});
    VertexCylinderPartition a, b;
    a.vertices = b.vertices = vs;
    a.cylinders = {{{{0}, {2, 3}}}, {{{1}, {2, 3}}}};
    b.cylinders = {{{{0, 1}, {2}}}, {{{0, 1}, {3}}}};
    a.validate();
    b.validate();
    EXPECT_FALSE(refines(a, b));
    EXPECT_FALSE(refines(b, a));
}

TEST(CylinderValidate, RejectsOverlapAndGaps) {
    auto vs = PartiteVertexSet::sized({2, 2});
    VertexCylinderPartition p;
    p.vertices = vs;
    p.cylinders = {{{{0, 1}, {2}}}};
    EXPECT_THROW(p.validate(), ValidationError);
    p.cylinders = {{{{0, 1}, {2, 3}}}, {{{0}, {2}}}};
    EXPECT_THROW(p.validate(), ValidationError);
}

TEST(CommonRefinement, Examples) {
    PairPartition a = PairPartition::trivial(4, 4);
    EXPECT_EQ(common_refinement(std::vector<const PairPartition*>{&a}), a);
    EXPECT_EQ(common_refinement(std::vector<const PairPartition*>{&a, &a}), a);
    PairPartition r = a, c = a;
    for (uint32_t x = 0; x < 4; ++x)
        for (uint32_t y = 0; y < 4; ++y) {
            r.at(x, y) = x < 2 ? 0 : 1;
            c.at(x, y) = y % 2;
        }
    r.parts = c.parts = 2;
    PairPartition both = common_refinement(std::vector<const PairPartition*>{&r, &c});
    EXPECT_EQ(both.parts, 4u);
    EXPECT_TRUE(refines(r, both));
    EXPECT_TRUE(refines(c, both));
}

TEST(Venn, TrivialGivesParts) {
    auto vs = PartiteVertexSet::sized({2, 3, 2});
    ChainPartition Q = venn_diagram(CylinderChainPartition::trivial(vs));
    ASSERT_EQ(Q.size(), 3u);
    for (uint32_t p = 0; p < 3; ++p) EXPECT_EQ(Q.classes[p], vs.members(p));
    for (const auto& e : Q.edges) EXPECT_EQ(e.parts, 1u);
    Q.validate();
}

TEST(Venn, RandomPartitionsAreValidAndCoverCylinders) {
    SplitMix64 rng(14);
    for (int k = 0; k < 30; ++k) {
        uint32_t t = 2 + uint32_t(rng.below(3));
        std::vector<uint32_t> sizes(t);
        for (auto& s : sizes) s = 1 + uint32_t(rng.below(4));
        auto vs = PartiteVertexSet::sized(sizes);
        auto P = random_cylinder_partition(vs, 6, 2, rng);
        ChainPartition Q = venn_diagram(P);
        Q.validate();
        EXPECT_LE(Int(Q.size()), Int(t) * (Int(1) << unsigned(P.vertex.cylinders.size())));
        for (const auto& Y : P.vertex.cylinders)
            for (const auto& cls : Q.classes) {
                uint32_t p = vs.part_of(cls[0]);
                std::set<uint32_t> s(Y.sets[p].begin(), Y.sets[p].end());
                std::size_t in = 0;
                for (auto v : cls) in += s.count(v);
                EXPECT_TRUE(in == 0 || in == cls.size());
            }
    }
}

TEST(Homogeneity, AllTriplesAndEmpty) {
    auto vs = PartiteVertexSet::sized({3, 3, 3});
    ThreeGraph full = random_partite_3graph({3, 3, 3}, 1, 1);
    ChainPartition Q = venn_diagram(CylinderChainPartition::trivial(vs));
    PolyFunction psi(1, 1);
    auto a = homogeneity_audit(full, Q, 0, psi);
    EXPECT_EQ(a.crossing_homogeneous_mass, 1);
    EXPECT_EQ(a.homogeneous_mass, a.crossing_mass);
    EXPECT_EQ(a.crossing_mass, rat(6 * 27, 729));
    auto b = homogeneity_audit(ThreeGraph::partite(vs), Q, 0, psi);
    EXPECT_EQ(b.crossing_homogeneous_mass, 1);
}

TEST(Homogeneity, ConeSplitAlongGraphIsFullyHomogeneous) {
    auto G = random_bipartite(4, 4, rat(1, 2), 3);
    ThreeGraph H = cone_hypergraph(G, 8);
    ChainPartition Q = venn_diagram(CylinderChainPartition::trivial(H.vertices()));
    PairPartition& ab = Q.edge(0, 1);
    for (uint32_t x = 0; x < 4; ++x)
        for (uint32_t y = 0; y < 4; ++y) ab.at(x, y) = G.pair(0, 1).adj.test(x, y) ? 0 : 1;
    ab.parts = 2;
    ab.compact();
    auto a = homogeneity_audit(H, Q, 0, PolyFunction(1, 1));
    EXPECT_EQ(a.crossing_homogeneous_mass, 1);
    // unsplit: one chain at density e(G)/16
    ChainPartition T = venn_diagram(CylinderChainPartition::trivial(H.vertices()));
    Rat d = ratio(Int(static_cast<unsigned long>(G.edge_count())), 16);
    auto b = homogeneity_audit(H, T, rat(1, 10), PolyFunction(1, 1));
    EXPECT_EQ(b.crossing_homogeneous_mass, (d <= rat(1, 10) || d >= rat(9, 10)) ? 1 : 0);
}

TEST(Homogeneity, MonotoneInGamma) {
    SplitMix64 rng(15);
    ThreeGraph h = random_partite_3graph({4, 4, 4}, rat(1, 3), 2);
    auto P = random_cylinder_partition(h.vertices(), 4, 2, rng);
    ChainPartition Q = venn_diagram(P);
    Rat prev = -1;
    for (Rat g : {rat(0), rat(1, 10), rat(1, 4), rat(1, 2)}) {
        auto a = homogeneity_audit(h, Q, g, PolyFunction(1, 1));
        EXPECT_GE(a.homogeneous_mass, prev);
        prev = a.homogeneous_mass;
    }
}

TEST(Markov, EmptyAndWholeChain) {
    Chain ch = random_chain({3, 3, 3}, rat(3, 4), 0, 4);
    std::array<std::vector<std::vector<uint32_t>>, 3> one{{{{0, 1, 2}}, {{0, 1, 2}}, {{0, 1, 2}}}};
    std::array<PairPartition, 3> pp{PairPartition::trivial(3, 3, &ch.dense().xy),
                                    PairPartition::trivial(3, 3, &ch.dense().xz),
                                    PairPartition::trivial(3, 3, &ch.dense().yz)};
    EXPECT_EQ(markov_split_check(ch, one, pp, rat(1, 25)).mass_bad, 0);
}

TEST(Markov, RandomSplitsStayBelowSqrtGamma) {
    SplitMix64 rng(16);
    int checked = 0;
    for (uint64_t seed = 1; checked < 20 && seed < 400; ++seed) {
        Chain ch = random_chain({6, 6, 6}, rat(3, 4), rat(1, 40), seed);
        if (relative_density(ch) >= rat(1, 25)) continue;
        ++checked;
        std::array<std::vector<std::vector<uint32_t>>, 3> cls;
        for (auto& c : cls) {
            c.resize(2);
            for (uint32_t v = 0; v < 6; ++v) c[v < 3 ? 0 : 1].push_back(v);
        }
        std::array<PairPartition, 3> pp{PairPartition::trivial(6, 6, &ch.dense().xy),
                                        PairPartition::trivial(6, 6, &ch.dense().xz),
                                        PairPartition::trivial(6, 6, &ch.dense().yz)};
        for (auto& p : pp) p = split_labels(p, rng);
        auto r = markov_split_check(ch, cls, pp, rat(1, 25));
        EXPECT_TRUE(r.within_bound);
        ASSERT_TRUE(r.bound.has_value());
        EXPECT_EQ(*r.bound, rat(1, 5));
        EXPECT_LT(r.mass_bad, rat(1, 5));
    }
    EXPECT_EQ(checked, 20);
}

TEST(PartitionJson, CylinderAndChainRoundTrip) {
    SplitMix64 rng(17);
    ThreeGraph h = random_partite_3graph({3, 4, 3}, rat(1, 2), 5);
    auto P = random_cylinder_partition(h.vertices(), 4, 3, rng);
    auto back = cylinder_partition_from_json(to_json(P));
    EXPECT_EQ(back.vertex.cylinders, P.vertex.cylinders);
    EXPECT_EQ(back.edges, P.edges);
    ChainPartition Q = venn_diagram(P);
    ChainPartition Qb = chain_partition_from_json(to_json(Q));
    EXPECT_EQ(Qb.classes, Q.classes);
    EXPECT_EQ(Qb.edges, Q.edges);
}
