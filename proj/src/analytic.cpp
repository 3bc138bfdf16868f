#include "cogmac/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cogmac {

namespace {

void require_unit_interval(double v, const std::string& name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(name + " = " + std::to_string(v) + " outside [0,1]");
    }
}

void require_lengths_match(const AccessPolicy& policy, const SensingProfile& profile) {
    if (policy.size() != profile.size()) {
        throw std::invalid_argument("policy has " + std::to_string(policy.size()) +
                                    " instants but profile has " +
                                    std::to_string(profile.size()));
    }
}

} // namespace

AccessPolicy AccessPolicy::zeros(std::size_t m) {
    AccessPolicy p;
    p.omega0 = 0.0;
    p.omega.assign(m, 0.0);
    p.beta.assign(m, 0.0);
    return p;
}

void AccessPolicy::validate() const {
    if (omega.size() != beta.size()) {
        throw std::invalid_argument("omega and beta must have identical length");
    }
    require_unit_interval(omega0, "omega0");
    for (std::size_t k = 0; k < omega.size(); ++k) {
        require_unit_interval(omega[k], "omega[" + std::to_string(k + 1) + "]");
        require_unit_interval(beta[k], "beta[" + std::to_string(k + 1) + "]");
    }
}

double primary_service_rate(const AccessPolicy& policy, const SensingProfile& profile,
                            const SystemParams& params) {
    require_lengths_match(policy, profile);
    double silent = 1.0 - policy.omega0;
    for (std::size_t k = 1; k <= profile.size(); ++k) {
        const auto& roc = profile.roc_at(k);
        silent *= roc.p_md * (1.0 - policy.omega[k - 1]) +
                  (1.0 - roc.p_md) * (1.0 - policy.beta[k - 1]);
    }
    return success_probability(params, LinkId::Primary, params.slot_seconds) * silent;
}

double primary_empty_probability(const TrafficParams& traffic, double mu_p) {
    if (traffic.lambda_p == 0.0) return 1.0;
    if (!is_stable(traffic, mu_p)) throw UnstableQueueError(traffic.lambda_p, mu_p);
    return 1.0 - traffic.lambda_p / mu_p;
}

double primary_delay(const TrafficParams& traffic, double mu_p) {
    if (!is_stable(traffic, mu_p)) throw UnstableQueueError(traffic.lambda_p, mu_p);
    return (1.0 - traffic.lambda_p) / (mu_p - traffic.lambda_p);
}

bool is_stable(const TrafficParams& traffic, double mu_p) {
    return traffic.lambda_p < mu_p;
}

SecondaryBreakdown secondary_breakdown(const AccessPolicy& policy, const SensingProfile& profile,
                                       const SystemParams& params,
                                       const TrafficParams& traffic) {
    require_lengths_match(policy, profile);
    const std::size_t m = profile.size();

    SecondaryBreakdown out;
    out.prefactor = primary_empty_probability(
        traffic, primary_service_rate(policy, profile, params));
    out.slot_start_term =
        policy.omega0 * success_probability(params, LinkId::Secondary, params.slot_seconds);
    out.reach.resize(m);
    out.access.resize(m);
    out.term.resize(m);

    // Walk the cascade conditioned on an idle slot: the sensed state at each
    // instant is governed by the false-alarm probability alone.
    double reach = 1.0 - policy.omega0;
    out.conditional_sum = out.slot_start_term;
    for (std::size_t k = 1; k <= m; ++k) {
        const auto& roc = profile.roc_at(k);
        const double access = (1.0 - roc.p_fa) * policy.omega[k - 1] +
                              roc.p_fa * policy.beta[k - 1];
        const double ps = success_probability(params, LinkId::Secondary,
                                              transmission_seconds(params, k));
        out.reach[k - 1] = reach;
        out.access[k - 1] = access;
        out.term[k - 1] = reach * access * ps;
        out.conditional_sum += out.term[k - 1];
        reach *= (1.0 - roc.p_fa) * (1.0 - policy.omega[k - 1]) +
                 roc.p_fa * (1.0 - policy.beta[k - 1]);
    }
    out.mu_s = out.prefactor * out.conditional_sum;
    return out;
}

double secondary_throughput(const AccessPolicy& policy, const SensingProfile& profile,
                            const SystemParams& params, const TrafficParams& traffic) {
    return secondary_breakdown(policy, profile, params, traffic).mu_s;
}

AnalyticMetrics analyze(const AccessPolicy& policy, const SensingProfile& profile,
                        const SystemParams& params, const TrafficParams& traffic) {
    AnalyticMetrics metrics;
    metrics.mu_p = primary_service_rate(policy, profile, params);
    metrics.stable = is_stable(traffic, metrics.mu_p);
    if (traffic.lambda_p == 0.0) {
        // No arrivals: the queue is empty in every slot. Delay is the sojourn a
        // hypothetical packet would see, defined only for positive service rate.
        metrics.p_empty = 1.0;
        if (metrics.mu_p > 0.0) metrics.delay_p = 1.0 / metrics.mu_p;
        metrics.mu_s = secondary_throughput(policy, profile, params, traffic);
    } else if (metrics.stable) {
        metrics.p_empty = primary_empty_probability(traffic, metrics.mu_p);
        metrics.delay_p = primary_delay(traffic, metrics.mu_p);
        metrics.mu_s = secondary_throughput(policy, profile, params, traffic);
    } else {
        metrics.mu_s = 0.0;
    }
    return metrics;
}

std::optional<double> perfect_bound(const TrafficParams& traffic, const SystemParams& params,
                                    double delay_cap) {
    if (!(delay_cap > 1.0)) throw std::domain_error("delay cap must exceed 1 slot");
    const double ps = success_probability(params, LinkId::Secondary, params.slot_seconds);
    if (traffic.lambda_p == 0.0) return ps;
    if (traffic.lambda_p > max_feasible_arrival(params, delay_cap)) return std::nullopt;
    const double pp = success_probability(params, LinkId::Primary, params.slot_seconds);
    return (1.0 - traffic.lambda_p / pp) * ps;
}

double max_feasible_arrival(const SystemParams& params, double delay_cap) {
    if (!(delay_cap > 1.0)) throw std::domain_error("delay cap must exceed 1 slot");
    const double pp = success_probability(params, LinkId::Primary, params.slot_seconds);
    const double lam = (pp * delay_cap - 1.0) / (delay_cap - 1.0);
    return std::clamp(lam, 0.0, 1.0);
}

} // namespace cogmac
