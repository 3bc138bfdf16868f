#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cogmac/analytic.hpp"

namespace cogmac {

enum class ProtocolVariant {
    Proposed,          // all 2M+1 access probabilities free
    SpHatNoBusyAccess, // proposed with every busy-access probability pinned to 0
    S1,                // single sensing instant, idle and busy probabilities free
    S2,                // single sensing instant, idle access certain, busy probability free
    S3,                // single sensing instant, access iff sensed idle
    S4,                // slot-start random access only, no sensing
    PerfectBound,      // genie outer bound, closed form
};

const char* variant_name(ProtocolVariant v);
ProtocolVariant variant_from_name(const std::string& name);  // throws on unknown

// Restriction of the policy box for one protocol variant. The parameter vector
// is laid out as [omega0, omega_1..omega_M, beta_1..beta_M].
struct VariantConstraints {
    std::vector<bool> free_mask;
    std::vector<double> fixed_values;   // consulted where free_mask is false
    std::vector<std::size_t> active_instants;  // instants (0..M) where access may occur

    std::size_t dimension() const { return free_mask.size(); }
    std::size_t free_count() const;
};

VariantConstraints variant_constraints(ProtocolVariant variant, std::size_t m);

struct OptimizerSettings {
    int multistarts = 64;
    int grid_points_per_dim = 101;
    double tolerance = 1e-9;
    int max_iterations = 200;
    std::uint64_t seed = 1;

    void validate() const;  // throws std::invalid_argument
};

struct OptimizationResult {
    AccessPolicy policy;
    double mu_s = 0.0;
    bool feasible = false;
    AnalyticMetrics metrics;
};

// Feasibility: stability plus the delay cap, which jointly reduce to
// mu_p(policy) >= lambda + (1 - lambda)/D. With no arrivals the primary queue
// is empty in every slot and both constraints are vacuous.
bool is_feasible(const AccessPolicy& policy, const TrafficParams& traffic,
                 const SensingProfile& profile, const SystemParams& params,
                 double delay_cap);

// Maximize the secondary throughput over the variant's free parameters by
// multistart coordinate ascent; within a coordinate the objective is
// affine-over-affine and is maximized in closed form over the feasible
// interval. Deterministic for a fixed settings.seed, independent of jobs.
OptimizationResult optimize(ProtocolVariant variant, const TrafficParams& traffic,
                            const SensingProfile& profile, const SystemParams& params,
                            double delay_cap, const OptimizerSettings& settings,
                            int jobs = 1);

// Independent verification oracle: exhaustive evaluation of the feasible grid,
// augmented with the point where each coordinate alone meets the delay
// constraint with equality. Guarded to at most 5 free parameters.
OptimizationResult grid_oracle(ProtocolVariant variant, const TrafficParams& traffic,
                               const SensingProfile& profile, const SystemParams& params,
                               double delay_cap, int grid_points_per_dim);

} // namespace cogmac
