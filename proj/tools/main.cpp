#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cogmac/config.hpp"
#include "cogmac/sweep.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kValidationFailure = 2, kIoError = 3 };

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    bool allow_nonmonotone = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_seed_jobs = true) {
    cmd->add_option("--config", opts.config_path, "run configuration file")
        ->required();
    if (with_seed_jobs) {
        cmd->add_option("--seed", opts.seed,
                        "override optimizer and simulation seeds from the config");
        cmd->add_option("--jobs", opts.jobs, "worker threads (0 = all cores)")
            ->check(CLI::NonNegativeNumber);
    }
    cmd->add_flag("--allow-nonmonotone-roc", opts.allow_nonmonotone,
                  "downgrade ROC monotonicity violations to warnings");
}

int read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read '" << path << "'\n";
        return kIoError;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return kOk;
}

cogmac::ParsedConfig load(const CommonOpts& opts, const std::string& text) {
    cogmac::ParsedConfig parsed =
        cogmac::parse_config(text, opts.allow_nonmonotone, opts.config_path);
    for (const std::string& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
    if (opts.seed) {
        parsed.config.optimizer.seed = *opts.seed;
        if (parsed.config.simulation) parsed.config.simulation->seed = *opts.seed;
    }
    return parsed;
}

std::string fmt(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

void print_policy(const cogmac::AccessPolicy& p) {
    std::cout << "  omega0 = " << fmt(p.omega0) << "\n  omega  =";
    for (double v : p.omega) std::cout << ' ' << fmt(v);
    std::cout << "\n  beta   =";
    for (double v : p.beta) std::cout << ' ' << fmt(v);
    std::cout << "\n";
}

cogmac::AccessPolicy parse_policy_list(const std::string& text, std::size_t m) {
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str())
            throw cogmac::ConfigError("--policy: expected a number, got '" + tok + "'");
        vals.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (vals.size() != 2 * m + 1)
        throw cogmac::ConfigError("--policy: expected " + std::to_string(2 * m + 1) +
                                  " values for M = " + std::to_string(m) + ", got " +
                                  std::to_string(vals.size()));
    cogmac::AccessPolicy p;
    p.omega0 = vals[0];
    p.omega.assign(vals.begin() + 1, vals.begin() + 1 + static_cast<long>(m));
    p.beta.assign(vals.begin() + 1 + static_cast<long>(m), vals.end());
    p.validate();
    return p;
}

int cmd_sweep(const CommonOpts& opts) {
    std::string text;
    if (int rc = read_file(opts.config_path, text)) return rc;
    cogmac::ParsedConfig parsed = load(opts, text);
    cogmac::SweepResult result = cogmac::run_sweep(parsed.config, opts.jobs, text);

    std::ofstream out(parsed.config.output_path, std::ios::binary);
    if (!out || !(out << result.csv) || !out.flush()) {
        std::cerr << "error: cannot write '" << parsed.config.output_path << "'\n";
        return kIoError;
    }
    std::cout << "wrote " << parsed.config.output_path << " (" << result.rows.size()
              << " rows)\n";
    if (parsed.config.simulation) {
        std::cout << "worst |z| = " << result.worst_abs_z << "\n";
        if (result.z_flagged) {
            std::cerr << "error: simulation z-score above 3\n";
            return kValidationFailure;
        }
    }
    return kOk;
}

int cmd_optimize(const CommonOpts& opts, double lambda, const std::string& variant_name_) {
    std::string text;
    if (int rc = read_file(opts.config_path, text)) return rc;
    cogmac::ParsedConfig parsed = load(opts, text);
    const cogmac::RunConfig& cfg = parsed.config;
    cogmac::ProtocolVariant variant = cogmac::variant_from_name(variant_name_);
    cogmac::TrafficParams traffic{lambda};

    cogmac::OptimizationResult r =
        cogmac::optimize(variant, traffic, cfg.profile, cfg.system, cfg.delay_cap,
                         cfg.optimizer, opts.jobs);
    std::cout << "variant = " << cogmac::variant_name(variant) << ", lambda = " << lambda
              << ", delay_cap = " << cfg.delay_cap << "\n";
    if (!r.feasible) {
        std::cout << "infeasible: no policy meets the stability and delay constraints\n";
        return kOk;
    }
    std::cout << "mu_s    = " << fmt(r.mu_s) << "\n";
    std::cout << "mu_p    = " << fmt(r.metrics.mu_p) << "\n";
    if (r.metrics.delay_p) std::cout << "delay_p = " << fmt(*r.metrics.delay_p) << "\n";
    if (r.metrics.p_empty) std::cout << "p_empty = " << fmt(*r.metrics.p_empty) << "\n";
    print_policy(r.policy);
    return kOk;
}

int cmd_simulate(const CommonOpts& opts, double lambda, const std::string& variant_name_,
                 const std::string& policy_list) {
    std::string text;
    if (int rc = read_file(opts.config_path, text)) return rc;
    cogmac::ParsedConfig parsed = load(opts, text);
    const cogmac::RunConfig& cfg = parsed.config;
    if (!cfg.simulation)
        throw cogmac::ConfigError(opts.config_path +
                                  ": simulate needs a [simulation] section");
    cogmac::TrafficParams traffic{lambda};

    cogmac::AccessPolicy policy;
    if (!policy_list.empty()) {
        policy = parse_policy_list(policy_list, cfg.profile.size());
    } else {
        cogmac::ProtocolVariant variant = cogmac::variant_from_name(variant_name_);
        if (variant == cogmac::ProtocolVariant::PerfectBound)
            throw cogmac::ConfigError("the perfect bound has no policy to simulate");
        cogmac::OptimizationResult r =
            cogmac::optimize(variant, traffic, cfg.profile, cfg.system, cfg.delay_cap,
                             cfg.optimizer, opts.jobs);
        if (!r.feasible)
            throw cogmac::ConfigError("optimizer found no feasible policy to simulate");
        policy = r.policy;
        std::cout << "simulating the optimized " << cogmac::variant_name(variant)
                  << " policy\n";
        print_policy(policy);
    }

    cogmac::ValidationReport rep = cogmac::validate_against_analytic(
        cfg.system, cfg.profile, policy, traffic, *cfg.simulation);
    std::printf("%-8s %22s %22s %10s\n", "metric", "analytic", "empirical", "z");
    for (const cogmac::ValidationRow& row : rep.rows)
        std::printf("%-8s %22.15g %22.15g %10.3f\n", row.name, row.analytic,
                    row.empirical, row.z);
    std::cout << "worst |z| = " << rep.worst_abs_z << "\n";
    if (rep.flagged) {
        std::cerr << "error: simulation disagrees with the closed forms (|z| > 3)\n";
        return kValidationFailure;
    }
    return kOk;
}

int cmd_validate(const CommonOpts& opts) {
    std::string text;
    if (int rc = read_file(opts.config_path, text)) return rc;
    cogmac::ParsedConfig parsed = load(opts, text);
    const cogmac::RunConfig& cfg = parsed.config;
    std::cout << opts.config_path << ": ok\n";
    std::cout << "  M = " << cfg.profile.size() << ", delay_cap = " << cfg.delay_cap
              << ", lambda points = " << cfg.lambda_grid.values().size() << "\n";
    std::cout << "  variants =";
    for (cogmac::ProtocolVariant v : cfg.variants)
        std::cout << ' ' << cogmac::variant_name(v);
    std::cout << "\n  simulation = " << (cfg.simulation ? "on" : "off") << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cognitive MAC access-policy optimizer and slot simulator"};
    app.require_subcommand(1);

    CommonOpts sweep_opts, opt_opts, sim_opts, val_opts;
    double opt_lambda = 0.0, sim_lambda = 0.0;
    std::string opt_variant = "proposed", sim_variant = "proposed", sim_policy;

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "sweep lambda and write the results CSV");
    add_common(sweep_cmd, sweep_opts);

    CLI::App* opt_cmd =
        app.add_subcommand("optimize", "optimize one (lambda, variant) point");
    add_common(opt_cmd, opt_opts);
    opt_cmd->add_option("--lambda", opt_lambda, "primary arrival rate, packets/slot")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    opt_cmd->add_option("--variant", opt_variant,
                        "proposed|sp_hat|s1|s2|s3|s4|perfect");

    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "validate a policy against the closed forms by simulation");
    add_common(sim_cmd, sim_opts);
    sim_cmd->add_option("--lambda", sim_lambda, "primary arrival rate, packets/slot")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    sim_cmd->add_option("--variant", sim_variant,
                        "optimize this variant, then simulate its policy");
    sim_cmd->add_option("--policy", sim_policy,
                        "simulate this explicit policy: omega0,omega_1..M,beta_1..M");

    CLI::App* val_cmd =
        app.add_subcommand("validate-config", "parse and check a config file");
    add_common(val_cmd, val_opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts);
        if (opt_cmd->parsed()) return cmd_optimize(opt_opts, opt_lambda, opt_variant);
        if (sim_cmd->parsed())
            return cmd_simulate(sim_opts, sim_lambda, sim_variant, sim_policy);
        if (val_cmd->parsed()) return cmd_validate(val_opts);
    } catch (const cogmac::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kOk;
}
