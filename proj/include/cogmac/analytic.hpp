#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cogmac/channel.hpp"
#include "cogmac/sensing.hpp"

namespace cogmac {

// The secondary user's decision vector: omega0 at the slot start, then one
// (omega, beta) pair per sensing instant -- access probability when the
// channel is sensed idle resp. busy.
struct AccessPolicy {
    double omega0 = 0.0;
    std::vector<double> omega;
    std::vector<double> beta;

    std::size_t size() const { return omega.size(); }

    static AccessPolicy zeros(std::size_t m);

    // Throws std::invalid_argument on out-of-range entries or length mismatch.
    void validate() const;
};

struct TrafficParams {
    double lambda_p = 0.0;  // mean primary arrivals, packets/slot, in [0,1]
};

struct AnalyticMetrics {
    double mu_p = 0.0;
    double mu_s = 0.0;
    std::optional<double> delay_p;  // slots; absent when the queue is unstable
    std::optional<double> p_empty;  // absent when the queue is unstable
    bool stable = false;            // strict lambda_p < mu_p
};

class UnstableQueueError : public std::runtime_error {
public:
    explicit UnstableQueueError(double lambda, double mu)
        : std::runtime_error("primary queue unstable: lambda_p = " + std::to_string(lambda) +
                             " >= mu_p = " + std::to_string(mu)) {}
};

// Average primary service rate: the success probability over the full slot
// times the probability that the secondary stays silent at every instant of a
// busy slot.
double primary_service_rate(const AccessPolicy& policy, const SensingProfile& profile,
                            const SystemParams& params);

// 1 - lambda/mu. Requires strict stability.
double primary_empty_probability(const TrafficParams& traffic, double mu_p);

// (1 - lambda) / (mu - lambda). Requires strict stability.
double primary_delay(const TrafficParams& traffic, double mu_p);

bool is_stable(const TrafficParams& traffic, double mu_p);

// Per-instant decomposition of the secondary throughput; the simulator
// cross-check compares empirical access-instant frequencies against it.
struct SecondaryBreakdown {
    double prefactor = 0.0;        // Pr{primary queue empty}
    double slot_start_term = 0.0;  // omega0 * Ps(T)
    std::vector<double> reach;     // prob of staying silent through instants < k (idle slot)
    std::vector<double> access;    // prob of accessing at instant k once reached
    std::vector<double> term;      // reach * access * Ps(T - k tau)
    double conditional_sum = 0.0;  // throughput conditioned on an empty primary queue
    double mu_s = 0.0;
};

// Secondary throughput. Requires stability (lambda_p = 0 counts: the queue is
// then empty in every slot and the prefactor is exactly 1).
double secondary_throughput(const AccessPolicy& policy, const SensingProfile& profile,
                            const SystemParams& params, const TrafficParams& traffic);

SecondaryBreakdown secondary_breakdown(const AccessPolicy& policy, const SensingProfile& profile,
                                       const SystemParams& params, const TrafficParams& traffic);

// All closed-form metrics for one operating point. Never throws on unstable
// configurations: mu_s is reported as 0 with delay/p_empty absent.
AnalyticMetrics analyze(const AccessPolicy& policy, const SensingProfile& profile,
                        const SystemParams& params, const TrafficParams& traffic);

// Outer bound: a genie-aided secondary that knows primary idleness with zero
// sensing time and zero error. nullopt when the delay cap excludes lambda_p.
std::optional<double> perfect_bound(const TrafficParams& traffic, const SystemParams& params,
                                    double delay_cap);

// Largest arrival rate for which the all-zero policy meets the delay cap:
// (Pp(T) * D - 1) / (D - 1), clamped to [0, 1].
double max_feasible_arrival(const SystemParams& params, double delay_cap);

} // namespace cogmac
