#include "cogmac/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "cogmac/channel.hpp"
#include "cogmac/parallel.hpp"
#include "cogmac/rng.hpp"

namespace cogmac {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile
constexpr std::size_t kBatches = 32;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double batch_se(const double* sums, const std::uint64_t* counts, std::size_t nb) {
    double means[kBatches];
    std::size_t used = 0;
    for (std::size_t i = 0; i < nb; ++i)
        if (counts[i] > 0) means[used++] = sums[i] / static_cast<double>(counts[i]);
    if (used < 2) return kNaN;
    double mean = 0.0;
    for (std::size_t i = 0; i < used; ++i) mean += means[i];
    mean /= static_cast<double>(used);
    double var = 0.0;
    for (std::size_t i = 0; i < used; ++i) {
        double d = means[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(used - 1);
    return std::sqrt(var / static_cast<double>(used));
}

double z_score(double empirical, double analytic, double ci) {
    if (std::isnan(empirical) || std::isnan(ci)) return kNaN;
    double se = ci / kZ99;
    if (se == 0.0) return empirical == analytic ? 0.0
                                                : std::numeric_limits<double>::infinity();
    return (empirical - analytic) / se;
}

} // namespace

void SimConfig::validate() const {
    if (n_slots <= warmup_slots)
        throw std::invalid_argument("simulation.n_slots must exceed warmup_slots");
}

SimMetrics simulate(const SystemParams& params, const SensingProfile& profile,
                    const AccessPolicy& policy, const TrafficParams& traffic,
                    const SimConfig& sim, std::ostream* trace) {
    params.validate();
    policy.validate();
    sim.validate();
    std::size_t m = profile.size();
    if (policy.size() != m)
        throw std::invalid_argument("simulate: policy and profile lengths differ");
    if (traffic.lambda_p < 0.0 || traffic.lambda_p > 1.0)
        throw std::invalid_argument("simulate: lambda_p outside [0,1]");

    std::vector<double> pfa(m), pmd(m);
    for (std::size_t k = 1; k <= m; ++k) {
        pfa[k - 1] = profile.roc_at(k).p_fa;
        pmd[k - 1] = profile.roc_at(k).p_md;
    }

    const std::uint64_t n = sim.n_slots;
    const std::uint64_t warmup = sim.warmup_slots;
    const std::uint64_t measured_total = n - warmup;
    const std::uint64_t batch_len = std::max<std::uint64_t>(1, measured_total / kBatches);

    SimMetrics out;
    out.su_access_at_idle.assign(m + 1, 0);

    double su_sum[kBatches] = {};
    double empty_sum[kBatches] = {};
    std::uint64_t slot_cnt[kBatches] = {};
    double dep_sum[kBatches] = {};
    std::uint64_t dep_cnt[kBatches] = {};

    Rng rng(sim.seed);
    std::deque<std::uint64_t> queue;
    std::string sensed;

    if (trace)
        *trace << "slot,q_len,pu_tx,su_instant,sensed,collision,pu_success,su_success,arrival\n";

    for (std::uint64_t t = 0; t < n; ++t) {
        const bool pu_active = !queue.empty();
        const std::uint64_t q_start = queue.size();

        // Access cascade: slot-start access first, then one sensing draw and
        // one access draw per instant until the SU transmits or gives up.
        int su_k = -1;
        if (trace) sensed.clear();
        if (rng.bernoulli(policy.omega0)) {
            su_k = 0;
        } else {
            for (std::size_t k = 1; k <= m; ++k) {
                bool sensed_busy = pu_active ? !rng.bernoulli(pmd[k - 1])
                                             : rng.bernoulli(pfa[k - 1]);
                if (trace) sensed.push_back(sensed_busy ? 'b' : 'i');
                double p = sensed_busy ? policy.beta[k - 1] : policy.omega[k - 1];
                if (rng.bernoulli(p)) {
                    su_k = static_cast<int>(k);
                    break;
                }
            }
        }

        const bool collision = pu_active && su_k >= 0;
        bool pu_success = false, su_success = false;
        if (pu_active && su_k < 0) {
            pu_success = draw_success(rng, params, LinkId::Primary, params.slot_seconds);
        } else if (!pu_active && su_k >= 0) {
            double tx = transmission_seconds(params, static_cast<std::size_t>(su_k));
            su_success = draw_success(rng, params, LinkId::Secondary, tx);
        }

        const bool measured = t >= warmup;
        std::uint64_t b = 0;
        if (measured) {
            b = std::min<std::uint64_t>(kBatches - 1, (t - warmup) / batch_len);
            ++out.measured_slots;
            ++slot_cnt[b];
            if (pu_active) {
                ++out.busy_slots;
            } else {
                ++out.idle_slots;
                empty_sum[b] += 1.0;
                if (su_k >= 0) ++out.su_access_at_idle[static_cast<std::size_t>(su_k)];
            }
            if (pu_success) ++out.pu_successes;
            if (su_success) {
                ++out.su_successes;
                su_sum[b] += 1.0;
            }
        }

        if (pu_success) {
            std::uint64_t tag = queue.front();
            queue.pop_front();
            if (measured) {
                ++out.departures;
                double sojourn = static_cast<double>(t - tag);
                out.delay_sum += sojourn;
                ++out.delay_samples;
                dep_sum[b] += sojourn;
                ++dep_cnt[b];
            }
            if (tag >= warmup) ++out.window_departures;
        }

        const bool arrival = rng.bernoulli(traffic.lambda_p);
        if (arrival) {
            queue.push_back(t);
            if (measured) ++out.window_arrivals;
        }

        if (trace) {
            *trace << t << ',' << q_start << ',' << (pu_active ? 1 : 0) << ',' << su_k
                   << ',' << (sensed.empty() ? "-" : sensed.c_str()) << ','
                   << (collision ? 1 : 0) << ',' << (pu_success ? 1 : 0) << ','
                   << (su_success ? 1 : 0) << ',' << (arrival ? 1 : 0) << '\n';
        }
    }

    out.final_queue_len = queue.size();
    for (std::uint64_t tag : queue)
        if (tag >= warmup) ++out.window_queue_remaining;

    const double slots = static_cast<double>(out.measured_slots);
    out.mu_s_hat = static_cast<double>(out.su_successes) / slots;
    out.p_empty_hat = static_cast<double>(out.idle_slots) / slots;
    if (out.busy_slots > 0) {
        double p = static_cast<double>(out.pu_successes) / static_cast<double>(out.busy_slots);
        out.mu_p_hat = p;
        out.mu_p_ci = kZ99 * std::sqrt(p * (1.0 - p) / static_cast<double>(out.busy_slots));
    } else {
        out.mu_p_hat = kNaN;
        out.mu_p_ci = kNaN;
    }
    if (out.delay_samples > 0) {
        out.delay_hat = out.delay_sum / static_cast<double>(out.delay_samples);
        double se = batch_se(dep_sum, dep_cnt, kBatches);
        out.delay_ci = std::isnan(se) ? kNaN : kZ99 * se;
    } else {
        out.delay_hat = kNaN;
        out.delay_ci = kNaN;
    }
    {
        double se = batch_se(su_sum, slot_cnt, kBatches);
        out.mu_s_ci = std::isnan(se) ? kNaN : kZ99 * se;
        se = batch_se(empty_sum, slot_cnt, kBatches);
        out.p_empty_ci = std::isnan(se) ? kNaN : kZ99 * se;
    }
    return out;
}

ValidationReport validate_against_analytic(const SystemParams& params,
                                           const SensingProfile& profile,
                                           const AccessPolicy& policy,
                                           const TrafficParams& traffic,
                                           const SimConfig& sim) {
    double mu_p = primary_service_rate(policy, profile, params);
    if (!is_stable(traffic, mu_p)) throw UnstableQueueError(traffic.lambda_p, mu_p);
    AnalyticMetrics ana = analyze(policy, profile, params, traffic);
    SimMetrics emp = simulate(params, profile, policy, traffic, sim);

    ValidationReport rep;
    rep.rows.push_back({"mu_p", ana.mu_p, emp.mu_p_hat, z_score(emp.mu_p_hat, ana.mu_p, emp.mu_p_ci)});
    rep.rows.push_back({"mu_s", ana.mu_s, emp.mu_s_hat, z_score(emp.mu_s_hat, ana.mu_s, emp.mu_s_ci)});
    rep.rows.push_back({"p_empty", ana.p_empty.value(), emp.p_empty_hat,
                        z_score(emp.p_empty_hat, ana.p_empty.value(), emp.p_empty_ci)});
    rep.rows.push_back({"delay", ana.delay_p.value(), emp.delay_hat,
                        z_score(emp.delay_hat, ana.delay_p.value(), emp.delay_ci)});
    for (const ValidationRow& r : rep.rows) {
        if (std::isnan(r.z)) continue;
        rep.worst_abs_z = std::max(rep.worst_abs_z, std::abs(r.z));
        if (std::abs(r.z) > 3.0) rep.flagged = true;
    }
    return rep;
}

std::vector<SimMetrics> simulate_replicated(const SystemParams& params,
                                            const SensingProfile& profile,
                                            const AccessPolicy& policy,
                                            const TrafficParams& traffic,
                                            const SimConfig& sim, int n_reps, int jobs) {
    if (n_reps < 1) throw std::invalid_argument("n_reps must be >= 1");
    std::vector<SimMetrics> reps(static_cast<std::size_t>(n_reps));
    parallel_for_index(static_cast<std::size_t>(n_reps), jobs, [&](std::size_t r) {
        SimConfig local = sim;
        local.seed = substream_seed(sim.seed, static_cast<std::uint64_t>(r));
        reps[r] = simulate(params, profile, policy, traffic, local);
    });
    return reps;
}

SimMetrics merge_replications(const std::vector<SimMetrics>& reps) {
    if (reps.empty()) throw std::invalid_argument("merge_replications: empty input");
    SimMetrics out;
    out.su_access_at_idle.assign(reps.front().su_access_at_idle.size(), 0);
    for (const SimMetrics& r : reps) {
        out.measured_slots += r.measured_slots;
        out.busy_slots += r.busy_slots;
        out.idle_slots += r.idle_slots;
        out.pu_successes += r.pu_successes;
        out.su_successes += r.su_successes;
        out.departures += r.departures;
        out.delay_samples += r.delay_samples;
        out.delay_sum += r.delay_sum;
        out.window_arrivals += r.window_arrivals;
        out.window_departures += r.window_departures;
        out.window_queue_remaining += r.window_queue_remaining;
        out.final_queue_len += r.final_queue_len;
        for (std::size_t k = 0; k < out.su_access_at_idle.size(); ++k)
            out.su_access_at_idle[k] += r.su_access_at_idle[k];
    }
    double slots = static_cast<double>(out.measured_slots);
    out.mu_s_hat = static_cast<double>(out.su_successes) / slots;
    out.p_empty_hat = static_cast<double>(out.idle_slots) / slots;
    out.mu_p_hat = out.busy_slots > 0 ? static_cast<double>(out.pu_successes) /
                                            static_cast<double>(out.busy_slots)
                                      : kNaN;
    out.delay_hat = out.delay_samples > 0
                        ? out.delay_sum / static_cast<double>(out.delay_samples)
                        : kNaN;

    // Between-replication spread; needs at least two replications per field.
    auto spread_ci = [&](auto getter) {
        double vals[1024];
        std::size_t used = 0;
        for (const SimMetrics& r : reps) {
            double v = getter(r);
            if (!std::isnan(v) && used < 1024) vals[used++] = v;
        }
        if (used < 2) return kNaN;
        double mean = 0.0;
        for (std::size_t i = 0; i < used; ++i) mean += vals[i];
        mean /= static_cast<double>(used);
        double var = 0.0;
        for (std::size_t i = 0; i < used; ++i) {
            double d = vals[i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(used - 1);
        return kZ99 * std::sqrt(var / static_cast<double>(used));
    };
    out.mu_p_ci = spread_ci([](const SimMetrics& r) { return r.mu_p_hat; });
    out.mu_s_ci = spread_ci([](const SimMetrics& r) { return r.mu_s_hat; });
    out.p_empty_ci = spread_ci([](const SimMetrics& r) { return r.p_empty_hat; });
    out.delay_ci = spread_ci([](const SimMetrics& r) { return r.delay_hat; });
    return out;
}

} // namespace cogmac
