#include "cogmac/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "cogmac/parallel.hpp"
#include "cogmac/rng.hpp"

namespace cogmac {

namespace {

constexpr double kZ99 = 2.5758293035489004;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string g17(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::string g10(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.10g", v);
    return b;
}

double z_of(double empirical, double analytic, double ci) {
    if (std::isnan(empirical) || std::isnan(ci) || std::isnan(analytic)) return kNaN;
    double se = ci / kZ99;
    if (se == 0.0)
        return empirical == analytic ? 0.0 : std::numeric_limits<double>::infinity();
    return (empirical - analytic) / se;
}

} // namespace

SweepResult run_sweep(const RunConfig& config, int jobs, const std::string& config_text) {
    const std::vector<double> lambdas = config.lambda_grid.values();
    const std::size_t n_variants = config.variants.size();
    const std::size_t n_rows = lambdas.size() * n_variants;
    const std::size_t m = config.profile.size();

    SweepResult result;
    result.rows.resize(n_rows);

    parallel_for_index(n_rows, jobs, [&](std::size_t r) {
        SweepRow& row = result.rows[r];
        row.lambda = lambdas[r / n_variants];
        row.variant = config.variants[r % n_variants];
        TrafficParams traffic{row.lambda};

        OptimizerSettings settings = config.optimizer;
        settings.seed = substream_seed(config.optimizer.seed, static_cast<std::uint64_t>(r));
        row.opt = optimize(row.variant, traffic, config.profile, config.system,
                           config.delay_cap, settings, 1);

        row.z_mu_p = row.z_mu_s = row.z_p_empty = row.z_delay = kNaN;
        if (config.simulation && row.opt.feasible &&
            row.variant != ProtocolVariant::PerfectBound) {
            SimConfig sim = *config.simulation;
            sim.seed = substream_seed(config.simulation->seed, static_cast<std::uint64_t>(r));
            row.sim = simulate(config.system, config.profile, row.opt.policy, traffic, sim);
            row.simulated = true;
            const AnalyticMetrics& ana = row.opt.metrics;
            row.z_mu_p = z_of(row.sim.mu_p_hat, ana.mu_p, row.sim.mu_p_ci);
            row.z_mu_s = z_of(row.sim.mu_s_hat, ana.mu_s, row.sim.mu_s_ci);
            row.z_p_empty = z_of(row.sim.p_empty_hat,
                                 ana.p_empty ? *ana.p_empty : kNaN, row.sim.p_empty_ci);
            row.z_delay = z_of(row.sim.delay_hat, ana.delay_p ? *ana.delay_p : kNaN,
                               row.sim.delay_ci);
        }
    });

    for (const SweepRow& row : result.rows) {
        for (double z : {row.z_mu_p, row.z_mu_s, row.z_p_empty, row.z_delay}) {
            if (std::isnan(z)) continue;
            result.worst_abs_z = std::max(result.worst_abs_z, std::abs(z));
            if (std::abs(z) > 3.0) result.z_flagged = true;
        }
    }

    std::string& csv = result.csv;
    char buf[160];
    csv += "# cogmac sweep results\n";
    std::snprintf(buf, sizeof buf, "# config_hash = 0x%016llx\n",
                  static_cast<unsigned long long>(fnv1a64(config_text)));
    csv += buf;
    csv += "# delay_cap = " + g17(config.delay_cap) + "\n";
    csv += "# m = " + std::to_string(m) + "\n";
    std::snprintf(buf, sizeof buf, "# optimizer_seed = %llu\n",
                  static_cast<unsigned long long>(config.optimizer.seed));
    csv += buf;
    if (config.simulation) {
        std::snprintf(buf, sizeof buf, "# simulation = n_slots %llu, warmup %llu, seed %llu\n",
                      static_cast<unsigned long long>(config.simulation->n_slots),
                      static_cast<unsigned long long>(config.simulation->warmup_slots),
                      static_cast<unsigned long long>(config.simulation->seed));
        csv += buf;
    }

    csv += "lambda,variant,feasible,mu_s,mu_p,delay_p,p_empty,omega0";
    for (std::size_t k = 1; k <= m; ++k) csv += ",omega_" + std::to_string(k);
    for (std::size_t k = 1; k <= m; ++k) csv += ",beta_" + std::to_string(k);
    if (config.simulation)
        csv += ",sim_mu_p,sim_mu_p_ci,sim_mu_s,sim_mu_s_ci,sim_p_empty,sim_p_empty_ci,"
               "sim_delay,sim_delay_ci,z_mu_p,z_mu_s,z_p_empty,z_delay";
    csv += "\n";

    for (const SweepRow& row : result.rows) {
        const AnalyticMetrics& mtr = row.opt.metrics;
        csv += g10(row.lambda);
        csv += ",";
        csv += variant_name(row.variant);
        csv += row.opt.feasible ? ",1," : ",0,";
        csv += g17(row.opt.mu_s);
        csv += "," + g17(mtr.mu_p);
        csv += "," + g17(mtr.delay_p ? *mtr.delay_p : kNaN);
        csv += "," + g17(mtr.p_empty ? *mtr.p_empty : kNaN);
        csv += "," + g17(row.opt.policy.omega0);
        for (double v : row.opt.policy.omega) csv += "," + g17(v);
        for (double v : row.opt.policy.beta) csv += "," + g17(v);
        if (config.simulation) {
            if (row.simulated) {
                csv += "," + g17(row.sim.mu_p_hat) + "," + g17(row.sim.mu_p_ci);
                csv += "," + g17(row.sim.mu_s_hat) + "," + g17(row.sim.mu_s_ci);
                csv += "," + g17(row.sim.p_empty_hat) + "," + g17(row.sim.p_empty_ci);
                csv += "," + g17(row.sim.delay_hat) + "," + g17(row.sim.delay_ci);
                csv += "," + g17(row.z_mu_p) + "," + g17(row.z_mu_s);
                csv += "," + g17(row.z_p_empty) + "," + g17(row.z_delay);
            } else {
                for (int i = 0; i < 12; ++i) csv += ",nan";
            }
        }
        csv += "\n";
    }
    return result;
}

} // namespace cogmac
