#include "doctest.h"

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cogmac/sweep.hpp"
#include "oracles.hpp"

using namespace cogmac;

namespace {

std::string two_instant_config(bool with_sim) {
    std::string text =
        "[system]\n"
        "noise_density = 1e-11\n"
        "power_primary = 3e-12\n"
        "power_secondary = 9e-10\n"
        "bandwidth_hz = 1e7\n"
        "slot_seconds = 4e-4\n"
        "sensing_quantum_seconds = 2e-4\n"
        "packet_bits = 1000\n"
        "var_primary_link = 1\n"
        "var_secondary_link = 1\n"
        "[profile]\n"
        "row = 1, 0.2, 0.2\n"
        "row = 2, 0.19, 0.19\n"
        "[sweep]\n"
        "delay_cap = 100\n"
        "lambda_start = 0\n"
        "lambda_stop = 0.2\n"
        "lambda_step = 0.1\n"
        "variants = proposed, sp_hat, s1, s2, s3, s4, perfect\n"
        "output = out.csv\n"
        "[optimizer]\n"
        "multistarts = 8\n";
    if (with_sim)
        text +=
            "[simulation]\n"
            "n_slots = 40000\n"
            "seed = 3\n";
    return text;
}

RunConfig load(const std::string& text) { return parse_config(text).config; }

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    std::string line;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!seen_header) {
            seen_header = true;
            continue;
        }
        out.push_back(line);
    }
    return out;
}

}  // namespace

TEST_CASE("sweep output is byte-identical across runs and jobs counts") {
    RunConfig cfg = load(two_instant_config(false));
    SweepResult a = run_sweep(cfg, 1, "fixture");
    SweepResult b = run_sweep(cfg, 1, "fixture");
    SweepResult c = run_sweep(cfg, 2, "fixture");
    CHECK(a.csv == b.csv);
    CHECK(a.csv == c.csv);
    CHECK(a.rows.size() == 21);
    CHECK(data_lines(a.csv).size() == 21);
}

TEST_CASE("rows appear in lambda-major, config-variant order") {
    RunConfig cfg = load(two_instant_config(false));
    SweepResult r = run_sweep(cfg);
    REQUIRE(r.rows.size() == 21);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(r.rows[i].variant == cfg.variants[i % 7]);
        CHECK(oracle::near(r.rows[i].lambda, 0.1 * static_cast<double>(i / 7), 1e-12));
    }
}

TEST_CASE("every emitted policy reproduces its own throughput") {
    RunConfig cfg = load(two_instant_config(false));
    SweepResult r = run_sweep(cfg);
    for (const SweepRow& row : r.rows) {
        TrafficParams t{row.lambda};
        if (row.variant == ProtocolVariant::PerfectBound) {
            auto bound = perfect_bound(t, cfg.system, cfg.delay_cap);
            if (row.opt.feasible) {
                REQUIRE(bound.has_value());
                CHECK(row.opt.mu_s == *bound);
            } else {
                CHECK(row.opt.mu_s == 0.0);
            }
            continue;
        }
        if (!row.opt.feasible) {
            CHECK(row.opt.mu_s == 0.0);
            continue;
        }
        AnalyticMetrics again = analyze(row.opt.policy, cfg.profile, cfg.system, t);
        CHECK(std::abs(row.opt.mu_s - again.mu_s) <= 1e-12);
        CHECK(is_feasible(row.opt.policy, t, cfg.profile, cfg.system, cfg.delay_cap));
    }
}

TEST_CASE("the unrestricted variant dominates every restriction") {
    RunConfig cfg = load(two_instant_config(false));
    SweepResult r = run_sweep(cfg);
    std::map<double, double> proposed;
    for (const SweepRow& row : r.rows)
        if (row.variant == ProtocolVariant::Proposed) proposed[row.lambda] = row.opt.mu_s;
    for (const SweepRow& row : r.rows) {
        if (row.variant == ProtocolVariant::Proposed ||
            row.variant == ProtocolVariant::PerfectBound)
            continue;
        CHECK(proposed.at(row.lambda) >= row.opt.mu_s - 1e-6);
    }
    for (const SweepRow& row : r.rows) {
        if (row.variant != ProtocolVariant::PerfectBound || !row.opt.feasible) continue;
        CHECK(proposed.at(row.lambda) <= row.opt.mu_s + 1e-12);
    }
}

TEST_CASE("csv carries the config hash and seeds in its comment block") {
    RunConfig cfg = load(two_instant_config(false));
    SweepResult tagged = run_sweep(cfg, 1, "some config text");
    char expect[64];
    std::snprintf(expect, sizeof expect, "# config_hash = 0x%016llx",
                  static_cast<unsigned long long>(fnv1a64("some config text")));
    CHECK(tagged.csv.find(expect) != std::string::npos);
    CHECK(tagged.csv.find("# delay_cap = 100") != std::string::npos);
    CHECK(tagged.csv.find("# m = 2") != std::string::npos);
    CHECK(tagged.csv.find("# optimizer_seed = 1") != std::string::npos);

    SweepResult untagged = run_sweep(cfg, 1, "other text");
    CHECK(tagged.csv != untagged.csv);
    CHECK(data_lines(tagged.csv) == data_lines(untagged.csv));
}

TEST_CASE("simulation columns appear only when configured") {
    RunConfig plain = load(two_instant_config(false));
    SweepResult without = run_sweep(plain);
    CHECK(without.csv.find("sim_mu_p") == std::string::npos);
    for (const SweepRow& row : without.rows) CHECK_FALSE(row.simulated);

    RunConfig cfg = load(two_instant_config(true));
    SweepResult with = run_sweep(cfg, 1, "cfg");
    CHECK(with.csv.find(
              "sim_mu_p,sim_mu_p_ci,sim_mu_s,sim_mu_s_ci,sim_p_empty,sim_p_empty_ci,"
              "sim_delay,sim_delay_ci,z_mu_p,z_mu_s,z_p_empty,z_delay") !=
          std::string::npos);
    CHECK(with.csv.find("# simulation = n_slots 40000, warmup 2000, seed 3") !=
          std::string::npos);

    bool any_sim = false;
    for (const SweepRow& row : with.rows) {
        if (row.variant == ProtocolVariant::PerfectBound || !row.opt.feasible) {
            CHECK_FALSE(row.simulated);
            continue;
        }
        any_sim = true;
        CHECK(row.simulated);
        CHECK(row.sim.measured_slots == 38000);
        CHECK(std::isfinite(row.z_mu_s));
    }
    CHECK(any_sim);
    CHECK(std::isfinite(with.worst_abs_z));
    CHECK(with.worst_abs_z < 6.0);

    // simulated sweeps stay reproducible and jobs-independent
    SweepResult again = run_sweep(cfg, 2, "cfg");
    CHECK(with.csv == again.csv);
}
