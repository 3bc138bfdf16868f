#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cogmac/analytic.hpp"

namespace cogmac {

struct SimConfig {
    std::uint64_t n_slots = 1'000'000;
    std::uint64_t warmup_slots = 50'000;
    std::uint64_t seed = 1;

    void validate() const;  // throws std::invalid_argument
};

// Estimates are NaN when the corresponding sample count is zero. Confidence
// half-widths are 99% two-sided; mu_p_hat uses a binomial error (per-slot
// outcomes are independent given a transmission attempt), the rest use batch
// means over the measurement window to absorb queue autocorrelation.
struct SimMetrics {
    double mu_p_hat = 0.0, mu_s_hat = 0.0, delay_hat = 0.0, p_empty_hat = 0.0;
    double mu_p_ci = 0.0, mu_s_ci = 0.0, delay_ci = 0.0, p_empty_ci = 0.0;

    std::uint64_t measured_slots = 0;
    std::uint64_t busy_slots = 0;  // nonempty primary queue at slot start
    std::uint64_t idle_slots = 0;  // complement; doubles as the empty-queue count
    std::uint64_t pu_successes = 0;
    std::uint64_t su_successes = 0;
    std::uint64_t departures = 0;
    std::uint64_t delay_samples = 0;
    double delay_sum = 0.0;

    // Conservation accounting over packets that arrived inside the window.
    std::uint64_t window_arrivals = 0;
    std::uint64_t window_departures = 0;
    std::uint64_t window_queue_remaining = 0;
    std::uint64_t final_queue_len = 0;

    // Access counts by instant (0..M), conditioned on an idle primary queue.
    std::vector<std::uint64_t> su_access_at_idle;
};

// One sequential slot-by-slot run. When trace is non-null every slot is
// logged as one CSV row (header first); tracing draws nothing from the RNG.
SimMetrics simulate(const SystemParams& params, const SensingProfile& profile,
                    const AccessPolicy& policy, const TrafficParams& traffic,
                    const SimConfig& sim, std::ostream* trace = nullptr);

struct ValidationRow {
    const char* name;
    double analytic = 0.0;
    double empirical = 0.0;
    double z = 0.0;  // NaN when the empirical side has no samples
};

struct ValidationReport {
    std::vector<ValidationRow> rows;
    double worst_abs_z = 0.0;  // over rows with finite z
    bool flagged = false;      // any finite |z| > 3
};

// Side-by-side closed-form vs Monte Carlo comparison. Refuses unstable
// configurations since the closed forms are undefined there.
ValidationReport validate_against_analytic(const SystemParams& params,
                                           const SensingProfile& profile,
                                           const AccessPolicy& policy,
                                           const TrafficParams& traffic,
                                           const SimConfig& sim);

// Independent replications with per-replication substreams; identical results
// for any jobs value.
std::vector<SimMetrics> simulate_replicated(const SystemParams& params,
                                            const SensingProfile& profile,
                                            const AccessPolicy& policy,
                                            const TrafficParams& traffic,
                                            const SimConfig& sim, int n_reps,
                                            int jobs = 1);

// Pure reduction of replication results: counts add, estimates recompute from
// the pooled counts, half-widths come from the between-replication spread.
SimMetrics merge_replications(const std::vector<SimMetrics>& reps);

} // namespace cogmac
