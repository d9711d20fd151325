#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "regulab/engines.hpp"
#include "regulab/generators.hpp"
#include "regulab/io.hpp"
#include "regulab/partition_io.hpp"
#include "regulab/vcdim.hpp"

using namespace regulab;
using nlohmann::json;

namespace {

enum Exit { ok = 0, usage = 1, audit_failed = 2, capacity = 3 };

struct Common {
    std::string input, output, profile = "desk", eta = "1/4", psi = "1,1";
    std::vector<std::string> overrides;
    uint64_t seed = 1;
};

ConstantsProfile make_profile(const Common& c) {
    ConstantsProfile p = ConstantsProfile::by_name(c.profile);
    for (const auto& kv : c.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ParseError("profile override '" + kv + "' is not key=value");
        p.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return p;
}

void emit(const Common& c, DecompositionReport r, std::chrono::steady_clock::time_point start) {
    r.seed = c.seed;
    r.runtime_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    if (c.output.empty()) std::cout << to_json(r).dump(2) << '\n';
    else save_report(c.output, r);
}

json cert_json(const Certificate& k) {
    return {{"value", to_string(k.value)},
            {"raw_sum", to_string(k.raw_sum)},
            {"normalizer", to_string(k.normalizer)},
            {"degenerate", k.degenerate}};
}

json tuple_audit_json(const TupleAudit& a) {
    return {{"good_mass", to_string(a.good_mass)},     {"homogeneous_mass", to_string(a.homogeneous_mass)},
            {"eta_mass", to_string(a.eta_mass)},       {"psi_mass", to_string(a.psi_mass)},
            {"dense_mass", to_string(a.dense_mass)},   {"exhaustive", a.exhaustive},
            {"tuples", a.tuples}};
}

json homogeneity_json(const HomogeneityAudit& a) {
    return {{"gamma", to_string(a.gamma)},
            {"homogeneous_mass", to_string(a.homogeneous_mass)},
            {"crossing_homogeneous_mass", to_string(a.crossing_homogeneous_mass)},
            {"crossing_mass", to_string(a.crossing_mass)},
            {"quasirandom_mass", to_string(a.quasirandom_mass)},
            {"degenerate_mass", to_string(a.degenerate_mass)},
            {"sparse_mass", to_string(a.sparse_mass)},
            {"convention", a.convention}};
}

json ids(const std::vector<uint32_t>& v) { return json(v); }

// ------------------------------------------------------------- subcommands

int run_analyze(const Common& c, const std::string& hyper, const std::optional<std::string>& eta_opt) {
    auto start = std::chrono::steady_clock::now();
    DecompositionReport r;
    r.command = "analyze";
    json audit;
    bool pass = true;
    std::optional<Rat> eta;
    if (eta_opt) eta = parse_rational(*eta_opt);
    if (!c.input.empty()) {
        Graph g = load_graph(c.input);
        r.input_hash = content_hash(canonical_text(g));
        MultipartiteGraph mg = g.to_multipartite();
        json pairs = json::array();
        for (uint32_t i = 0; i < mg.t(); ++i)
            for (uint32_t j = i + 1; j < mg.t(); ++j) {
                Certificate k = pair_quasirandomness(mg.pair(i, j).adj);
                json e = cert_json(k);
                e["parts"] = {i, j};
                e["density"] = to_string(pair_density(mg, i, j));
                pairs.push_back(e);
            }
        audit["pairs"] = pairs;
        if (mg.t() >= 2) audit["graph_alpha"] = to_string(multipartite_graph_quasirandomness(mg));
        if (!hyper.empty()) {
            ThreeGraph h = load_three_graph(hyper);
            r.input_hash = content_hash(canonical_text(g) + canonical_text(h));
            if (mg.t() == 3) {
                Chain ch(mg, h);
                Certificate k = chain_quasirandomness(ch);
                audit["chain"] = cert_json(k);
                audit["relative_density"] = to_string(relative_density(ch));
                if (eta) pass = k.holds(*eta);
            } else {
                TPartiteResult tr = tpartite_chain_quasirandomness(mg, h, eta.value_or(Rat(1)));
                json arr = json::array();
                for (const auto& tc : tr.certificates) {
                    json e = cert_json(tc.cert);
                    e["parts"] = tc.parts;
                    arr.push_back(e);
                }
                audit["chains"] = arr;
                if (eta) pass = tr.holds;
            }
        } else if (eta) {
            pass = multipartite_graph_quasirandomness(mg) <= *eta;
        }
    } else if (!hyper.empty()) {
        ThreeGraph h = load_three_graph(hyper);
        r.input_hash = content_hash(canonical_text(h));
        if (h.vertices().t() != 3) throw ValidationError("a 3-graph alone is analysed on three parts");
        Chain ch(MultipartiteGraph::complete(h.vertices()), h);
        Certificate k = chain_quasirandomness(ch);
        audit["chain"] = cert_json(k);
        audit["relative_density"] = to_string(relative_density(ch));
        if (eta) pass = k.holds(*eta);
    } else {
        throw ParseError("analyze needs --input (graph) and/or --hyper (3-graph)");
    }
    if (eta) audit["eta"] = to_string(*eta);
    audit["pass"] = pass;
    r.audit = audit;
    emit(c, r, start);
    return pass ? ok : audit_failed;
}

int run_cylinder(const Common& c) {
    auto start = std::chrono::steady_clock::now();
    ThreeGraph h = load_three_graph(c.input);
    Rat eta = parse_rational(c.eta);
    PolyFunction psi = PolyFunction::parse(c.psi);
    HyperResult res = hyper_cylinder_regularity(h, eta, psi, make_profile(c));
    TupleAudit check = eta_psi_audit(h, res.partition, eta, psi);
    DecompositionReport r;
    r.command = "cylinder";
    r.input_hash = content_hash(canonical_text(h));
    r.profile = res.profile.to_json();
    r.trace = res.trace.to_json();
    r.audit = tuple_audit_json(check);
    bool pass = check.good_mass >= 1 - eta;
    r.audit["pass"] = pass;
    r.part_counts = {{"cylinders", res.partition.vertex.cylinders.size()},
                     {"max_edge_parts", res.partition.max_edge_parts()}};
    r.extra["partition"] = to_json(res.partition);
    emit(c, r, start);
    return pass ? ok : audit_failed;
}

int run_decompose(const Common& c, bool graph_mode, const std::string& eps_s, unsigned vc2_hint) {
    auto start = std::chrono::steady_clock::now();
    DecompositionReport r;
    r.command = "decompose";
    ConstantsProfile prof = make_profile(c);
    bool pass;
    if (graph_mode) {
        Graph g = load_graph(c.input);
        Rat eps = parse_rational(eps_s);
        GraphHomogeneousResult res = graph_homogeneous_decomposition(g, eps, prof);
        r.input_hash = content_hash(canonical_text(g));
        r.profile = prof.to_json();
        r.trace = res.trace.to_json();
        pass = res.homogeneous_mass >= 1 - 2 * eps;
        r.audit = {{"homogeneous_pair_mass", to_string(res.homogeneous_mass)},
                   {"eps", to_string(eps)},
                   {"pass_threshold", to_string(Rat(1 - 2 * eps))},
                   {"pass", pass}};
        r.part_counts = {{"t", res.t}, {"cylinders", res.cylinders}, {"classes", res.classes.size()}};
        json cls = json::array();
        for (const auto& k : res.classes) cls.push_back(ranges_of(k));
        r.extra["classes"] = cls;
    } else {
        ThreeGraph h = load_three_graph(c.input);
        Rat eta = parse_rational(c.eta);
        HomogeneousResult res = homogeneous_decomposition(h, vc2_hint, eta, PolyFunction::parse(c.psi), prof);
        r.input_hash = content_hash(canonical_text(h));
        r.profile = res.profile.to_json();
        r.trace = res.trace.to_json();
        r.audit = homogeneity_json(res.audit);
        pass = res.audit.crossing_homogeneous_mass >= 1 - 2 * eta;
        r.audit["pass_threshold"] = to_string(Rat(1 - 2 * eta));
        r.audit["pair_quasirandom_mass"] = to_string(res.pair_mass);
        r.audit["cylinder_audit"] = tuple_audit_json(res.cylinder_audit);
        r.audit["pass"] = pass;
        r.part_counts = {{"t", res.t}, {"classes", res.partition.size()},
                         {"max_edge_parts", res.partition.max_edge_parts()}};
        r.extra["partition"] = to_json(res.partition);
    }
    emit(c, r, start);
    return pass ? ok : audit_failed;
}

int run_vc2(const Common& c, unsigned cap_d) {
    auto start = std::chrono::steady_clock::now();
    ThreeGraph h = load_three_graph(c.input);
    Vc2Result v = vc2_dimension(h, cap_d);
    DecompositionReport r;
    r.command = "vc2";
    r.input_hash = content_hash(canonical_text(h));
    r.audit = {{"vc2", v.d},
               {"witness",
                {{"A", ids(v.witness.A)}, {"B", ids(v.witness.B)}, {"realizers", ids(v.witness.realizer)}}},
               {"verified", v.d == 0 || verify_vc2(h, v.witness)}};
    emit(c, r, start);
    return ok;
}

int run_subset(const Common& c, const std::string& forbidden) {
    auto start = std::chrono::steady_clock::now();
    ThreeGraph h = load_three_graph(c.input);
    Rat eta = parse_rational(c.eta);
    PolyFunction psi = PolyFunction::parse(c.psi);
    ConstantsProfile prof = make_profile(c);
    DecompositionReport r;
    r.command = "subset";
    r.input_hash = content_hash(canonical_text(h));
    r.profile = prof.resolved(eta, std::max<uint32_t>(prof.parts, 3)).to_json();
    auto subset_json = [](const SubsetResult& s) {
        json edges = json::array();
        for (auto [u, v] : s.G.edges()) edges.push_back({u, v});
        return json{{"U", ranges_of(s.U)},
                    {"G_edges", edges},
                    {"common_density", to_string(s.common_density)},
                    {"chosen_parts", ids(s.chosen_parts)},
                    {"cylinder", s.cylinder},
                    {"certificate", cert_json(s.certificate)},
                    {"eta_psi", s.eta_psi},
                    {"relative_density", to_string(s.relative_density)}};
    };
    bool pass;
    if (forbidden.empty()) {
        SubsetResult s = quasirandom_subset(h, eta, psi, prof, c.seed);
        r.audit = subset_json(s);
        pass = s.eta_psi;
    } else {
        ThreeGraph F = load_three_graph(forbidden);
        RodlResult rr = rodl_sparse_dense(h, F, eta, psi, prof, c.seed);
        r.audit = subset_json(rr.subset);
        r.audit["flag"] = rr.flag;
        if (rr.witness) r.audit["witness"] = ids(*rr.witness);
        if (!rr.diagnostic.empty()) r.audit["diagnostic"] = rr.diagnostic;
        pass = rr.flag != "neither";
    }
    r.audit["pass"] = pass;
    emit(c, r, start);
    return pass ? ok : audit_failed;
}

std::pair<uint32_t, uint32_t> parse_range(const std::string& s) {
    auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            uint32_t v = static_cast<uint32_t>(std::stoul(s));
            return {v, v};
        }
        return {static_cast<uint32_t>(std::stoul(s.substr(0, dots))),
                static_cast<uint32_t>(std::stoul(s.substr(dots + 2)))};
    } catch (const std::exception&) {
        throw ParseError("size range must look like 4..8");
    }
}

int run_oracle_check(const Common& c, const std::string& sizes, uint32_t cases) {
    auto start = std::chrono::steady_clock::now();
    auto [lo, hi] = parse_range(sizes);
    if (lo < 1 || hi < lo) throw ParseError("bad size range");
    SplitMix64 rng(c.seed);
    auto size = [&] { return lo + static_cast<uint32_t>(rng.below(hi - lo + 1)); };
    uint32_t c4_bad = 0, oct_bad = 0, q_bad = 0;
    for (uint32_t k = 0; k < cases; ++k) {
        MultipartiteGraph b = random_bipartite(size(), size(), rat(1, 2), rng.next());
        if (pair_quasirandomness(b.pair(0, 1).adj, Mode::fast).raw_sum !=
            pair_quasirandomness(b.pair(0, 1).adj, Mode::naive).raw_sum)
            ++c4_bad;
        std::vector<uint32_t> sz{size(), size(), size()};
        MultipartiteGraph g = random_multipartite(sz, rat(3, 4), rng.next());
        ThreeGraph h3 = random_partite_3graph(sz, rat(1, 2), rng.next());
        ThreeGraph h = ThreeGraph::partite(g.vertices());
        for (const auto& e : h3.triples())
            if (g.adjacent(e.a, e.b) && g.adjacent(e.a, e.c) && g.adjacent(e.b, e.c)) h.add(e.a, e.b, e.c);
        Chain ch(g, h);
        if (chain_quasirandomness(ch, Mode::fast).raw_sum != chain_quasirandomness(ch, Mode::naive).raw_sum) ++oct_bad;
        EdgePartition pe = EdgePartition::trivial(g);
        for (auto& pp : pe.pairs) {
            for (auto& l : pp.label)
                if (l >= 0) l = static_cast<int32_t>(rng.below(3));
            pp.parts = 3;
        }
        if (q_edge_partition(ch, pe, Mode::fast) != q_edge_partition(ch, pe, Mode::naive)) ++q_bad;
    }
    DecompositionReport r;
    r.command = "oracle-check";
    bool pass = c4_bad == 0 && oct_bad == 0 && q_bad == 0;
    r.audit = {{"cases", cases},
               {"sizes", {lo, hi}},
               {"c4_mismatches", c4_bad},
               {"oct_mismatches", oct_bad},
               {"q_mismatches", q_bad},
               {"all_equal", pass}};
    emit(c, r, start);
    return pass ? ok : audit_failed;
}

int run_generate(const Common& c, const std::string& kind, const std::map<std::string, std::string>& kv) {
    auto num = [&](const char* key) -> uint32_t {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParseError(std::string("generate ") + kind + " needs --" + key);
        return static_cast<uint32_t>(std::stoul(it->second));
    };
    auto prob = [&] {
        auto it = kv.find("p");
        return it == kv.end() ? rat(1, 2) : parse_rational(it->second);
    };
    std::ofstream file;
    if (!c.output.empty()) {
        file.open(c.output);
        if (!file) throw ParseError("cannot write " + c.output);
    }
    std::ostream& out = c.output.empty() ? std::cout : file;
    if (kind == "vd") write_three_graph(out, make_vd(num("d")));
    else if (kind == "fd") write_graph(out, make_fd(num("d")));
    else if (kind == "cone")
        write_three_graph(out, cone_hypergraph(random_bipartite(num("na"), num("nb"), prob(), c.seed), num("n")));
    else if (kind == "link") write_three_graph(out, random_link_hypergraph(num("na"), num("nb"), num("nc"), c.seed));
    else if (kind == "tournament") write_three_graph(out, random_tournament_3graph(num("n"), c.seed));
    else if (kind == "partite3") {
        uint32_t m = num("m");
        write_three_graph(out, random_partite_3graph({m, m, m}, prob(), c.seed));
    } else if (kind == "bipartite") write_graph(out, random_bipartite(num("na"), num("nb"), prob(), c.seed));
    else if (kind == "graph") write_graph(out, random_graph(num("n"), prob(), c.seed));
    else if (kind == "half") write_graph(out, half_graph(num("n")));
    else if (kind == "linkstructured")
        write_three_graph(out, link_structured_3graph(num("n"), kv.count("noise") ? parse_rational(kv.at("noise")) : Rat(0),
                                                      c.seed));
    else throw ParseError("unknown generator '" + kind + "'");
    return ok;
}

void set_threads(int flag) {
    int n = flag;
    if (n <= 0) {
        if (const char* env = std::getenv("REGULAB_THREADS")) n = std::atoi(env);
    }
    if (n > 0) omp_set_num_threads(n);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regulab: cylinder regularity for graphs and 3-graphs"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker cap (falls back to REGULAB_THREADS)");

    Common c;
    auto common = [&](CLI::App* s, bool engine) {
        s->add_option("--input,-i", c.input, "input file");
        s->add_option("--output,-o", c.output, "report path (stdout if omitted)");
        s->add_option("--seed", c.seed, "seed");
        if (engine) {
            s->add_option("--eta", c.eta, "eta as a rational, e.g. 1/4");
            s->add_option("--psi", c.psi, "psi as c,k for min(c x^k, x)");
            s->add_option("--profile", c.profile, "desk or paper");
            s->add_option("--set", c.overrides, "desk profile override key=value");
        }
    };

    auto* analyze = app.add_subcommand("analyze", "quasirandomness certificates of a graph and/or chain");
    common(analyze, false);
    std::string hyper;
    std::optional<std::string> analyze_eta;
    analyze->add_option("--hyper", hyper, "3-graph file");
    analyze->add_option("--eta", analyze_eta, "threshold to test against");

    auto* decompose = app.add_subcommand("decompose", "homogeneous decomposition");
    common(decompose, true);
    bool graph_mode = false;
    std::string eps = "1/4";
    unsigned vc2_hint = 1;
    decompose->add_flag("--graph", graph_mode, "input is a graph; run the graph pipeline");
    decompose->add_option("--eps", eps, "epsilon for the graph pipeline");
    decompose->add_option("--vc2", vc2_hint, "VC2 bound hint");

    auto* cylinder = app.add_subcommand("cylinder", "3-graph cylinder regularity only");
    common(cylinder, true);

    auto* vc2 = app.add_subcommand("vc2", "VC2 dimension with witness");
    common(vc2, false);
    unsigned cap_d = 3;
    vc2->add_option("--cap-d", cap_d, "largest d searched");

    auto* subset = app.add_subcommand("subset", "quasirandom subset, or the sparse/dense dichotomy with --forbidden");
    common(subset, true);
    std::string forbidden;
    subset->add_option("--forbidden", forbidden, "forbidden 3-graph F");

    auto* generate = app.add_subcommand("generate", "write a construction in the text format");
    common(generate, false);
    std::string kind;
    std::map<std::string, std::string> params;
    generate->add_option("kind", kind, "vd fd cone link tournament partite3 bipartite graph half linkstructured")
        ->required();
    for (const char* k : {"d", "n", "na", "nb", "nc", "m", "p", "noise"})
        generate->add_option_function<std::string>(std::string("--") + k,
                                                   [&params, k](const std::string& v) { params[k] = v; });

    auto* oracle = app.add_subcommand("oracle-check", "fast kernels against the naive sums");
    common(oracle, false);
    std::string sizes = "4..8";
    uint32_t cases = 100;
    oracle->add_option("--sizes", sizes, "part size range lo..hi");
    oracle->add_option("--cases", cases, "number of random instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }
    set_threads(threads);

    try {
        if (*analyze) return run_analyze(c, hyper, analyze_eta);
        if (*decompose) return run_decompose(c, graph_mode, eps, vc2_hint);
        if (*cylinder) return run_cylinder(c);
        if (*vc2) return run_vc2(c, cap_d);
        if (*subset) return run_subset(c, forbidden);
        if (*generate) return run_generate(c, kind, params);
        if (*oracle) return run_oracle_check(c, sizes, cases);
    } catch (const ScheduleSaturated& e) {
        std::cerr << "refused: " << e.what() << '\n' << e.report.to_json().dump(2) << '\n';
        return capacity;
    } catch (const NonterminationError& e) {
        std::cerr << "nontermination: " << e.what() << '\n';
        return capacity;
    } catch (const CapacityError& e) {
        std::cerr << "capacity: " << e.what() << '\n';
        return capacity;
    } catch (const RefinementFailure& e) {
        std::cerr << "refinement failure: " << e.what() << '\n';
        return capacity;
    } catch (const SearchFailure& e) {
        std::cerr << "search failure: " << e.what() << '\n';
        return capacity;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    }
    return usage;
}
