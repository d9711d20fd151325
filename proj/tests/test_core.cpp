#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "regulab/io.hpp"
#include "support.hpp"

using namespace regulab;
using namespace regulab::testing;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("regulab_core_" + name)).string();
}

}  // namespace

TEST(Rational, ParsesFractionsAndDecimals) {
    EXPECT_EQ(parse_rational("1/4"), rat(1, 4));
    EXPECT_EQ(parse_rational("0.25"), rat(1, 4));
    EXPECT_EQ(parse_rational("-2"), rat(-2));
    EXPECT_THROW(parse_rational("1/0"), ParseError);
    EXPECT_THROW(parse_rational("abc"), ParseError);
    EXPECT_EQ(ratio(0, 0), 0);
}

TEST(Rational, LessThanSqrtIsExact) {
    EXPECT_TRUE(less_than_sqrt(rat(1, 5) - rat(1, 1000000), rat(1, 25)));
    EXPECT_FALSE(less_than_sqrt(rat(1, 5), rat(1, 25)));
    EXPECT_TRUE(less_than_sqrt(rat(3, 10), rat(9, 100) + rat(1, 1000000)));
}

TEST(Poly, MinOfMonomialAndIdentity) {
    PolyFunction psi = PolyFunction::parse("1/16,3");
    EXPECT_EQ(psi(rat(1, 2)), rat(1, 128));
    EXPECT_EQ(psi(0), 0);
    EXPECT_EQ(PolyFunction(1, 1)(rat(1, 2)), rat(1, 2));
    EXPECT_THROW(PolyFunction(rat(100), 1), DomainError);
}

TEST(VertexSet, ContiguousRanges) {
    PartiteVertexSet vs({{"A", 2}, {"B", 3}, {"C", 1}});
    EXPECT_EQ(vs.n(), 6u);
    EXPECT_EQ(vs.part(1).begin, 2u);
    EXPECT_EQ(vs.part_of(4), 1u);
    EXPECT_EQ(vs.local(4), 2u);
    EXPECT_THROW(PartiteVertexSet({{"A", 1}, {"A", 1}}), ValidationError);
}

TEST(TriangleCount, CompleteTwoTwoTwo) {
    EXPECT_EQ(triangle_count(MultipartiteGraph::complete(PartiteVertexSet::sized({2, 2, 2}))), 8);
}

TEST(TriangleCount, EmptyPartGivesZero) {
    EXPECT_EQ(triangle_count(MultipartiteGraph::complete(PartiteVertexSet::sized({3, 0, 4}))), 0);
}

TEST(TriangleCount, MatchesEnumerationOnRandomGraphs) {
    EXPECT_EQ(triangle_count(random_multipartite({5, 5, 5}, rat(1, 2), 7)),
              naive_triangles(random_multipartite({5, 5, 5}, rat(1, 2), 7)));
    for (uint64_t seed = 1; seed <= 30; ++seed) {
        auto g = random_multipartite({3 + uint32_t(seed % 5), 4, 2 + uint32_t(seed % 7)}, rat(2, 3), seed);
        EXPECT_EQ(triangle_count(g), naive_triangles(g)) << "seed " << seed;
    }
}

TEST(RelativeDensity, SingleHyperedge) {
    auto vs = PartiteVertexSet::sized({1, 1, 1});
    ThreeGraph h = ThreeGraph::partite(vs);
    h.add(0, 1, 2);
    EXPECT_EQ(relative_density(Chain(MultipartiteGraph::complete(vs), h)), 1);
}

TEST(RelativeDensity, NoTrianglesIsZero) {
    auto vs = PartiteVertexSet::sized({2, 2, 2});
    MultipartiteGraph g(vs);
    g.add_edge(0, 2);
    EXPECT_EQ(relative_density(Chain(g, ThreeGraph::partite(vs))), 0);
}

TEST(RelativeDensity, ThreeOfEight) {
    auto vs = PartiteVertexSet::sized({2, 2, 2});
    ThreeGraph h = ThreeGraph::partite(vs);
    h.add(0, 2, 4);
    h.add(0, 3, 5);
    h.add(1, 2, 5);
    EXPECT_EQ(relative_density(Chain(MultipartiteGraph::complete(vs), h)), rat(3, 8));
}

TEST(Chain, RejectsHyperedgeOffTriangle) {
    auto vs = PartiteVertexSet::sized({1, 1, 1});
    MultipartiteGraph g(vs);
    g.add_edge(0, 1);
    ThreeGraph h = ThreeGraph::partite(vs);
    h.add(0, 1, 2);
    EXPECT_THROW(Chain(g, h), ValidationError);
}

TEST(RestrictChain, FullSetsGiveIdenticalChain) {
    Chain c = random_chain({4, 4, 4}, rat(2, 3), rat(1, 2), 3);
    const auto& vs = c.graph().vertices();
    Chain r = restrict_chain(c, {vs.members(0), vs.members(1), vs.members(2)});
    EXPECT_EQ(r.hyper(), c.hyper());
    EXPECT_EQ(relative_density(r), relative_density(c));
    EXPECT_EQ(r.graph().edges(), c.graph().edges());
}

TEST(RestrictChain, EmptyPartGivesZeroDensity) {
    Chain c = random_chain({4, 4, 4}, rat(2, 3), rat(1, 2), 4);
    const auto& vs = c.graph().vertices();
    Chain r = restrict_chain(c, {vs.members(0), {}, vs.members(2)});
    EXPECT_EQ(triangle_count(r.dense()), 0);
    EXPECT_EQ(relative_density(r), 0);
}

TEST(RestrictChain, RandomHalfMatchesRecount) {
    SplitMix64 rng(11);
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        auto vs = PartiteVertexSet::sized({5, 5, 5});
        ThreeGraph h = random_partite_3graph({5, 5, 5}, rat(1, 2), seed);
        Chain c(MultipartiteGraph::complete(vs), h);
        MultipartiteGraph half(vs);
        for (auto [u, v] : c.graph().edges())
            if (rng.coin()) half.add_edge(u, v);
        Chain r = restrict_chain(c, {vs.members(0), vs.members(1), vs.members(2)}, half);
        EXPECT_EQ(relative_density(r), naive_density(r));
        Int t = 0, e = 0;
        for (const auto& tr : h.triples())
            if (half.adjacent(tr.a, tr.b) && half.adjacent(tr.a, tr.c) && half.adjacent(tr.b, tr.c)) ++e;
        t = naive_triangles(half);
        EXPECT_EQ(relative_density(r), ratio(e, t));
    }
}

TEST(RestrictChain, RejectsForeignEdges) {
    auto vs = PartiteVertexSet::sized({2, 2, 2});
    MultipartiteGraph g(vs);
    g.add_edge(0, 2);
    Chain c(g, ThreeGraph::partite(vs));
    MultipartiteGraph extra(vs);
    extra.add_edge(0, 3);
    EXPECT_THROW(restrict_chain(c, {vs.members(0), vs.members(1), vs.members(2)}, extra), ContainmentError);
    EXPECT_THROW(restrict_chain(c, std::array<std::vector<uint32_t>, 3>{std::vector<uint32_t>{2}, vs.members(1), vs.members(2)}), ContainmentError);
}

TEST(ProductDensity, Examples) {
    auto vs = PartiteVertexSet::sized({2, 3, 4});
    EXPECT_EQ(product_density(MultipartiteGraph::complete(vs)), 1);
    MultipartiteGraph e(vs);
    e.add_edge(0, 2);
    EXPECT_EQ(product_density(e), 0);
    EXPECT_THROW(product_density(MultipartiteGraph::complete(PartiteVertexSet::sized({2, 0, 2}))),
                 UndefinedDensityError);
}

TEST(ProductDensity, HalfThirdQuarter) {
    auto vs = PartiteVertexSet::sized({2, 3, 4});
    MultipartiteGraph g(vs);
    for (auto [u, v] : std::vector<std::pair<uint32_t, uint32_t>>{{0, 2}, {0, 3}, {1, 4}}) g.add_edge(u, v);
    for (auto [u, v] : std::vector<std::pair<uint32_t, uint32_t>>{{0, 5}, {1, 6}}) g.add_edge(u, v);
    for (auto [u, v] : std::vector<std::pair<uint32_t, uint32_t>>{{2, 5}, {3, 6}, {4, 7}, {2, 8}}) g.add_edge(u, v);
    EXPECT_EQ(pair_density(g, 0, 1), rat(1, 2));
    EXPECT_EQ(pair_density(g, 0, 2), rat(1, 4));
    EXPECT_EQ(pair_density(g, 1, 2), rat(1, 3));
    EXPECT_EQ(product_density(g), rat(1, 24));
}

TEST(TextFormat, ThreeGraphRoundTrip) {
    ThreeGraph h = random_partite_3graph({4, 5, 3}, rat(1, 3), 99);
    std::string path = temp_path("h.h3");
    save_three_graph(path, h);
    EXPECT_EQ(load_three_graph(path), h);
    std::remove(path.c_str());
}

TEST(TextFormat, GraphRoundTrip) {
    Graph g = random_graph(12, rat(1, 2), 5);
    std::stringstream ss;
    write_graph(ss, g);
    EXPECT_EQ(read_graph(ss), g);
}

TEST(TextFormat, VertexOutOfRangeIsParseError) {
    std::istringstream in("part A 2\npart B 2\npart C 2\nt 0 2 6\n");
    EXPECT_THROW(read_three_graph(in), ParseError);
}

TEST(TextFormat, SamePartTripleIsValidationError) {
    std::istringstream in("part A 2\npart B 2\npart C 2\nt 0 1 4\n");
    EXPECT_THROW(read_three_graph(in), ValidationError);
}

TEST(TextFormat, CommentsAndUnknownRecords) {
    std::istringstream ok("# header\npart A 1\npart B 1\npart C 1\nt 0 1 2 # trailing\n");
    EXPECT_EQ(read_three_graph(ok).size(), 1u);
    std::istringstream bad("part A 1\nx 0\n");
    EXPECT_THROW(read_three_graph(bad), ParseError);
}

TEST(Report, RoundTripAndSchema) {
    DecompositionReport r;
    r.command = "decompose";
    r.input_hash = content_hash("abc");
    r.seed = 42;
    r.audit = {{"mass", "3/4"}};
    r.trace = nlohmann::json::array({{{"tau", 0}}});
    auto j = to_json(r);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(report_from_json(j), r);
    std::string path = temp_path("report.json");
    save_report(path, r);
    EXPECT_EQ(load_report(path), r);
    std::remove(path.c_str());
    j["schema"] = 2;
    EXPECT_THROW(report_from_json(j), ParseError);
}

TEST(Hash, Sha256KnownVector) {
    EXPECT_EQ(content_hash("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hash, CanonicalTextIgnoresInsertionOrder) {
    auto vs = PartiteVertexSet::sized({2, 2, 2});
    ThreeGraph a = ThreeGraph::partite(vs), b = ThreeGraph::partite(vs);
    a.add(0, 2, 4);
    a.add(1, 3, 5);
    b.add(5, 3, 1);
    b.add(4, 0, 2);
    EXPECT_EQ(content_hash(canonical_text(a)), content_hash(canonical_text(b)));
}

TEST(Base64, RoundTrip) {
    for (std::size_t n = 0; n < 20; ++n) {
        std::vector<uint8_t> bytes(n);
        for (std::size_t k = 0; k < n; ++k) bytes[k] = uint8_t(k * 37 + 11);
        EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
    }
    EXPECT_EQ(base64_encode({'f', 'o', 'o'}), "Zm9v");
}
