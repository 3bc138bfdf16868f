// Times the parallel kernels against their serial runs and verifies that the
// results are identical, since every worker draws from its own substream and
// writes by index. Usage: parallel_bench [jobs]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "cogmac/config.hpp"
#include "cogmac/optimizer.hpp"
#include "cogmac/parallel.hpp"
#include "cogmac/simulator.hpp"
#include "cogmac/sweep.hpp"

using namespace cogmac;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

SystemParams bench_params() {
    SystemParams p{};
    p.noise_density = 1e-11;
    p.power_primary = 3e-12;
    p.power_secondary = 9e-10;
    p.bandwidth_hz = 1e7;
    p.slot_seconds = 4e-4;
    p.sensing_quantum_seconds = 4e-5;
    p.packet_bits = 1000.0;
    p.var_primary_link = 1.0;
    p.var_secondary_link = 1.0;
    return p;
}

void print_row(const char* name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-22s %10.3fs %12.3fs %9.2fx   %s\n", name, serial_s, parallel_s,
                serial_s / parallel_s, identical ? "identical" : "DIFFERS");
}

}  // namespace

int main(int argc, char** argv) {
    int jobs = argc > 1 ? std::atoi(argv[1]) : effective_jobs(0);
    if (jobs < 1) {
        std::fprintf(stderr, "jobs must be >= 1\n");
        return 1;
    }
    std::printf("comparing jobs=1 against jobs=%d\n", jobs);
    std::printf("%-22s %11s %13s %10s\n", "kernel", "serial", "parallel", "speedup");

    SystemParams params = bench_params();
    SensingProfile profile = default_profile(10);
    bool all_identical = true;

    {
        TrafficParams t{0.35};
        OptimizerSettings settings;
        settings.multistarts = 512;

        auto t0 = Clock::now();
        OptimizationResult serial = optimize(ProtocolVariant::Proposed, t, profile,
                                             params, 100.0, settings, 1);
        double ts = seconds_since(t0);

        t0 = Clock::now();
        OptimizationResult parallel = optimize(ProtocolVariant::Proposed, t, profile,
                                               params, 100.0, settings, jobs);
        double tp = seconds_since(t0);

        bool same = serial.mu_s == parallel.mu_s &&
                    serial.policy.omega0 == parallel.policy.omega0 &&
                    serial.policy.omega == parallel.policy.omega &&
                    serial.policy.beta == parallel.policy.beta;
        all_identical = all_identical && same;
        print_row("optimizer multistart", ts, tp, same);
    }

    {
        AccessPolicy policy = AccessPolicy::zeros(10);
        policy.omega0 = 0.02;
        for (std::size_t k = 0; k < 10; ++k) policy.omega[k] = 0.03;
        TrafficParams t{0.3};
        SimConfig sim;
        sim.n_slots = 500'000;
        sim.warmup_slots = 25'000;

        auto t0 = Clock::now();
        auto serial = simulate_replicated(params, profile, policy, t, sim, 8, 1);
        double ts = seconds_since(t0);

        t0 = Clock::now();
        auto parallel = simulate_replicated(params, profile, policy, t, sim, 8, jobs);
        double tp = seconds_since(t0);

        bool same = serial.size() == parallel.size();
        for (std::size_t r = 0; same && r < serial.size(); ++r)
            same = serial[r].mu_p_hat == parallel[r].mu_p_hat &&
                   serial[r].mu_s_hat == parallel[r].mu_s_hat &&
                   serial[r].delay_sum == parallel[r].delay_sum;
        all_identical = all_identical && same;
        print_row("simulator replicas", ts, tp, same);
    }

    {
        RunConfig cfg;
        cfg.system = params;
        cfg.profile = profile;
        cfg.delay_cap = 100.0;
        cfg.lambda_grid = {0.0, 0.5, 0.05};
        cfg.variants = {ProtocolVariant::Proposed, ProtocolVariant::SpHatNoBusyAccess,
                        ProtocolVariant::S1, ProtocolVariant::S4};
        cfg.optimizer.multistarts = 64;

        auto t0 = Clock::now();
        SweepResult serial = run_sweep(cfg, 1, "bench");
        double ts = seconds_since(t0);

        t0 = Clock::now();
        SweepResult parallel = run_sweep(cfg, jobs, "bench");
        double tp = seconds_since(t0);

        bool same = serial.csv == parallel.csv;
        all_identical = all_identical && same;
        print_row("policy sweep", ts, tp, same);
    }

    if (!all_identical) {
        std::printf("parallel results diverged from the serial reference\n");
        return 1;
    }
    return 0;
}
