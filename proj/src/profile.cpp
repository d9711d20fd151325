#include "regulab/profile.hpp"

#include <algorithm>

namespace regulab {

namespace {

Int ceil_of(const Rat& x) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return q;
}

ExtInt sat() { return ExtInt{true, Int(0)}; }

}  // namespace

ExtInt pow_capped(unsigned base, const ExtInt& e, const Int& cap) {
    if (base < 2) throw DomainError("pow_capped needs base >= 2");
    if (e.saturated) return sat();
    if (e.value < 0) throw DomainError("negative exponent");
    // base^e >= 2^e > cap once e reaches the bit length of cap.
    const std::size_t bits = mpz_sizeinbase(cap.get_mpz_t(), 2);
    if (e.value > Int(static_cast<unsigned long>(bits))) return sat();
    Int v;
    mpz_ui_pow_ui(v.get_mpz_t(), base, e.value.get_ui());
    if (v > cap) return sat();
    return ExtInt{false, v};
}

ExtInt pow_capped(unsigned base, const Rat& e, const Int& cap) {
    if (e < 0) throw DomainError("negative exponent");
    return pow_capped(base, ExtInt{false, ceil_of(e)}, cap);
}

ExtInt twr(unsigned tau, const Rat& x, const Int& cap) {
    if (x < 0) throw DomainError("twr needs x >= 0");
    ExtInt v{false, ceil_of(x)};
    if (v.value > cap) return sat();
    for (unsigned k = 0; k < tau; ++k) {
        v = pow_capped(2, v, cap);
        if (v.saturated) return v;
    }
    return v;
}

ConstantsProfile ConstantsProfile::paper() {
    ConstantsProfile p;
    p.name = "paper";
    return p;
}

ConstantsProfile ConstantsProfile::by_name(const std::string& name) {
    if (name == "desk") return desk();
    if (name == "paper") return paper();
    throw ValidationError("unknown profile '" + name + "' (expected desk or paper)");
}

ConstantsProfile ConstantsProfile::resolved(const Rat& eta, uint32_t t) const {
    ConstantsProfile r = *this;
    Rat tt(t);
    if (!r.q_gain) r.q_gain = Rat(eta * eta * eta / (1024 * tt * tt * tt));
    if (!r.refine_gain) r.refine_gain = Rat(eta * eta / 1024);
    if (!r.gamma) r.gamma = eta;
    if (*r.q_gain <= 0) throw ValidationError("q_gain must be positive");
    if (r.max_steps < 1) throw ValidationError("max_steps must be at least 1");
    return r;
}

static uint32_t parse_u32(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("profile key '" + key + "' expects a non-negative integer");
    return static_cast<uint32_t>(std::stoul(v));
}

void ConstantsProfile::apply_override(const std::string& key, const std::string& value) {
    if (name != "desk") throw ValidationError("profile overrides are only valid under the desk profile");
    if (key == "q_gain") q_gain = parse_rational(value);
    else if (key == "refine_gain") refine_gain = parse_rational(value);
    else if (key == "edge_part_cap") edge_part_cap = parse_u32(key, value);
    else if (key == "graph_alpha") graph_alpha = parse_rational(value);
    else if (key == "delta_floor") delta_floor = parse_rational(value);
    else if (key == "index_gain") index_gain = parse_rational(value);
    else if (key == "max_steps") max_steps = parse_u32(key, value);
    else if (key == "witness_search") {
        if (value == "auto") witness_search = WitnessSearch::automatic;
        else if (value == "exhaustive") witness_search = WitnessSearch::exhaustive;
        else if (value == "greedy") witness_search = WitnessSearch::greedy;
        else throw ParseError("witness_search must be auto, exhaustive or greedy");
    } else if (key == "exhaustive_side") exhaustive_side = parse_u32(key, value);
    else if (key == "witnesses_per_part") witnesses_per_part = parse_u32(key, value);
    else if (key == "parts") parts = parse_u32(key, value);
    else if (key == "subset_s") subset_s = parse_u32(key, value);
    else if (key == "gamma") gamma = parse_rational(value);
    else if (key == "audit_exhaustive_limit") audit_exhaustive_limit = parse_u32(key, value);
    else if (key == "audit_samples") audit_samples = parse_u32(key, value);
    else throw ParseError("unknown profile key '" + key + "'");
    if (max_steps < 1) throw ValidationError("max_steps must be at least 1");
    if (q_gain && *q_gain <= 0) throw ValidationError("q_gain must be positive");
}

static const char* witness_name(WitnessSearch w) {
    switch (w) {
        case WitnessSearch::exhaustive: return "exhaustive";
        case WitnessSearch::greedy: return "greedy";
        default: return "auto";
    }
}

nlohmann::json ConstantsProfile::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["q_gain"] = q_gain ? nlohmann::json(to_string(*q_gain)) : nlohmann::json(nullptr);
    j["refine_gain"] = refine_gain ? nlohmann::json(to_string(*refine_gain)) : nlohmann::json(nullptr);
    j["edge_part_cap"] = edge_part_cap;
    j["graph_alpha"] = to_string(graph_alpha);
    j["delta_floor"] = to_string(delta_floor);
    j["index_gain"] = to_string(index_gain);
    j["max_steps"] = max_steps;
    j["witness_search"] = witness_name(witness_search);
    j["exhaustive_side"] = exhaustive_side;
    j["witnesses_per_part"] = witnesses_per_part;
    j["parts"] = parts;
    j["subset_s"] = subset_s;
    j["gamma"] = gamma ? nlohmann::json(to_string(*gamma)) : nlohmann::json(nullptr);
    j["audit_exhaustive_limit"] = audit_exhaustive_limit;
    j["audit_samples"] = audit_samples;
    return j;
}

ConstantsProfile ConstantsProfile::from_json(const nlohmann::json& j) {
    ConstantsProfile p = by_name(j.at("name").get<std::string>());
    auto opt = [&](const char* k) -> std::optional<Rat> {
        if (!j.contains(k) || j.at(k).is_null()) return std::nullopt;
        return parse_rational(j.at(k).get<std::string>());
    };
    p.q_gain = opt("q_gain");
    p.refine_gain = opt("refine_gain");
    p.gamma = opt("gamma");
    p.edge_part_cap = j.at("edge_part_cap").get<uint32_t>();
    p.graph_alpha = parse_rational(j.at("graph_alpha").get<std::string>());
    p.delta_floor = parse_rational(j.at("delta_floor").get<std::string>());
    p.index_gain = parse_rational(j.at("index_gain").get<std::string>());
    p.max_steps = j.at("max_steps").get<uint32_t>();
    std::string w = j.at("witness_search").get<std::string>();
    p.witness_search = w == "exhaustive" ? WitnessSearch::exhaustive
                       : w == "greedy"   ? WitnessSearch::greedy
                                         : WitnessSearch::automatic;
    p.exhaustive_side = j.at("exhaustive_side").get<uint32_t>();
    p.witnesses_per_part = j.at("witnesses_per_part").get<uint32_t>();
    p.parts = j.at("parts").get<uint32_t>();
    p.subset_s = j.at("subset_s").get<uint32_t>();
    p.audit_exhaustive_limit = j.at("audit_exhaustive_limit").get<uint64_t>();
    p.audit_samples = j.at("audit_samples").get<uint64_t>();
    return p;
}

ScheduleReport evaluate_paper_schedule(const Rat& eta, uint32_t t, const PolyFunction& psi, unsigned max_tau,
                                       const Int& cap) {
    if (eta <= 0 || eta > 1) throw DomainError("eta must lie in (0, 1]");
    if (t < 3) throw DomainError("the schedule needs t >= 3");
    ScheduleReport r;
    // c x^k <= 2^-100 x^28 on (0,1) iff k >= 28 and c <= 2^-100.
    r.psi_admissible = psi.k >= 28 && psi.c <= Rat(1, Int(1) << 100);
    const Rat t2(t * t);
    const unsigned pairs = t * (t - 1) / 2;
    ExtInt A{false, Int(1)}, B{false, Int(1)};
    for (unsigned tau = 0; tau <= max_tau; ++tau) {
        ScheduleStep s;
        s.tau = tau;
        s.A = A;
        s.B = B;
        if (!B.saturated) {
            Rat delta = pow(eta / (t2 * Rat(B.value)), pairs);
            s.delta = delta;
            s.alpha = psi(delta);
            s.edge_cap = pow_capped(3, Rat(1 / pow(delta, 4)), cap);
        } else {
            s.edge_cap = sat();
        }
        bool any = s.A.saturated || s.B.saturated || s.edge_cap.saturated;
        if (any && !r.saturated_at) r.saturated_at = tau;
        r.steps.push_back(s);
        if (tau == max_tau) break;
        // Advance to tau + 1.
        ExtInt nextB;
        if (B.saturated) {
            nextB = sat();
        } else {
            Rat inner = pow(t2 * Rat(B.value) / eta, 2 * t * t);
            nextB = pow_capped(2, pow_capped(2, inner, cap), cap);
        }
        ExtInt nextA;
        if (nextB.saturated || A.saturated) {
            nextA = sat();
        } else {
            Rat arg = eta / (t2 * Rat(nextB.value));
            Rat e = Rat(nextB.value) * Rat(t * t * t * t) / pow(psi(arg), 20 * t * t);
            ExtInt f = pow_capped(2, e, cap);
            if (f.saturated) nextA = sat();
            else {
                Int v = f.value * A.value;
                nextA = v > cap ? sat() : ExtInt{false, v};
            }
        }
        A = nextA;
        B = nextB;
    }
    r.refused = r.saturated_at.has_value() || !r.psi_admissible;
    if (r.saturated_at)
        r.reason = "twr-type schedule exceeds 2^" + std::to_string(mpz_sizeinbase(cap.get_mpz_t(), 2) - 1) +
                   " at tau = " + std::to_string(*r.saturated_at);
    else if (!r.psi_admissible)
        r.reason = "psi violates psi(x) <= 2^-100 x^28";
    return r;
}

nlohmann::json ScheduleReport::to_json() const {
    nlohmann::json j;
    j["psi_admissible"] = psi_admissible;
    j["refused"] = refused;
    j["reason"] = reason;
    j["saturated_at"] = saturated_at ? nlohmann::json(*saturated_at) : nlohmann::json(nullptr);
    auto arr = nlohmann::json::array();
    for (const auto& s : steps) {
        nlohmann::json e;
        e["tau"] = s.tau;
        e["A"] = s.A.str();
        e["B"] = s.B.str();
        e["edge_cap"] = s.edge_cap.str();
        e["delta"] = s.delta ? nlohmann::json(to_string(*s.delta)) : nlohmann::json(nullptr);
        // alpha has thousands of digits for the admissible psi; report its size only.
        if (s.alpha)
            e["alpha_log2_den"] = mpz_sizeinbase(s.alpha->get_den_mpz_t(), 2);
        arr.push_back(e);
    }
    j["steps"] = arr;
    return j;
}

bool IterationTrace::q_nondecreasing() const {
    for (std::size_t k = 1; k < steps.size(); ++k)
        if (steps[k].q < steps[k - 1].q) return false;
    return true;
}

unsigned IterationTrace::refinements() const {
    unsigned n = 0;
    for (const auto& s : steps)
        if (s.action == "refine") ++n;
    return n;
}

nlohmann::json IterationTrace::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& s : steps) {
        nlohmann::json e;
        e["tau"] = s.tau;
        e["q"] = to_string(s.q);
        e["pv"] = s.pv;
        e["pe"] = s.pe;
        e["useful_mass"] = to_string(s.useful_mass);
        e["good_mass"] = to_string(s.good_mass);
        e["action"] = s.action;
        e["refinement_failures"] = s.refinement_failures;
        arr.push_back(e);
    }
    return arr;
}

}  // namespace regulab
