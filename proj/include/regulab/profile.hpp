#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "regulab/errors.hpp"
#include "regulab/poly.hpp"
#include "regulab/rational.hpp"

namespace regulab {

// Exact value, or a marker that the cap was exceeded.
struct ExtInt {
    bool saturated = false;
    Int value{0};

    std::string str() const { return saturated ? "saturated" : value.get_str(); }
};

inline Int default_cap() { return Int(1) << 64; }

// twr(0, x) = x, twr(k + 1, x) = 2^twr(k, x). A non-integer top x is rounded up.
ExtInt twr(unsigned tau, const Rat& x, const Int& cap = default_cap());

// base^e with base >= 2, saturating above cap.
ExtInt pow_capped(unsigned base, const ExtInt& e, const Int& cap = default_cap());
ExtInt pow_capped(unsigned base, const Rat& e, const Int& cap = default_cap());

enum class WitnessSearch { automatic, exhaustive, greedy };

struct ConstantsProfile {
    std::string name = "desk";
    std::optional<Rat> q_gain;       // per-step q increase (default 2^-10 eta^3 / t^3)
    std::optional<Rat> refine_gain;  // one-cylinder gain target (default 2^-10 eta^2)
    uint32_t edge_part_cap = 16;
    Rat graph_alpha = rat(1, 32);    // alpha handed to the cylinder regularizers
    Rat delta_floor = 0;             // minimum product density of a useful chain
    Rat index_gain = rat(1, 1 << 20);  // per-step edge-index increase of the graph engines
    uint32_t max_steps = 64;
    WitnessSearch witness_search = WitnessSearch::automatic;
    uint32_t exhaustive_side = 16;   // exhaustive witness search below this many vertices per side
    uint32_t witnesses_per_part = 2;
    uint32_t parts = 6;              // t of the pipelines' equitable partition
    uint32_t subset_s = 3;
    std::optional<Rat> gamma;        // homogeneity threshold (default eta)
    uint64_t audit_exhaustive_limit = 1000000;
    uint64_t audit_samples = 10000;

    static ConstantsProfile desk() { return {}; }
    static ConstantsProfile paper();
    static ConstantsProfile by_name(const std::string& name);

    // Fills the eta/t dependent defaults.
    ConstantsProfile resolved(const Rat& eta, uint32_t t) const;
    // key=value override; only accepted under the desk profile.
    void apply_override(const std::string& key, const std::string& value);

    nlohmann::json to_json() const;
    static ConstantsProfile from_json(const nlohmann::json& j);
};

// Literal evaluation of the iteration schedule: A(0) = B(0) = 1,
// B(k+1) = 2^2^((t^2 B(k)/eta)^(2t^2)),
// A(k+1) = 2^(B(k+1) t^4 psi(eta/(t^2 B(k+1)))^(-20 t^2)) A(k),
// delta(k) = (eta/(t^2 B(k)))^C(t,2), alpha(k) = psi(delta(k)),
// edge cap 3^(delta(k)^-4).
struct ScheduleStep {
    unsigned tau = 0;
    ExtInt A, B, edge_cap;
    std::optional<Rat> delta, alpha;  // absent once B saturates
};

struct ScheduleReport {
    std::vector<ScheduleStep> steps;
    std::optional<unsigned> saturated_at;  // first tau with a saturated quantity
    bool psi_admissible = false;           // psi(x) <= 2^-100 x^28 on (0, 1)
    bool refused = false;
    std::string reason;

    nlohmann::json to_json() const;
};

ScheduleReport evaluate_paper_schedule(const Rat& eta, uint32_t t, const PolyFunction& psi, unsigned max_tau = 2,
                                       const Int& cap = default_cap());

// Thrown by engines under the "paper" profile.
class ScheduleSaturated : public CapacityError {
public:
    explicit ScheduleSaturated(ScheduleReport r)
        : CapacityError("paper schedule saturates: " + r.reason), report(std::move(r)) {}
    ScheduleReport report;
};

struct TraceStep {
    unsigned tau = 0;
    Rat q;
    std::size_t pv = 0;  // vertex cylinders (or classes)
    uint32_t pe = 0;     // largest edge partition
    Rat useful_mass;
    Rat good_mass;
    std::string action;
    uint32_t refinement_failures = 0;
};

struct IterationTrace {
    std::vector<TraceStep> steps;

    bool q_nondecreasing() const;
    // Number of refinement steps that ran.
    unsigned refinements() const;
    nlohmann::json to_json() const;
};

}  // namespace regulab
