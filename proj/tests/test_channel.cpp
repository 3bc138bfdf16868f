#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cogmac/channel.hpp"
#include "cogmac/rng.hpp"
#include "oracles.hpp"

using namespace cogmac;

TEST_CASE("num_instants floors the slot/quantum ratio") {
    SystemParams p = oracle::reference_params();
    CHECK(num_instants(p) == 10);

    p.sensing_quantum_seconds = p.slot_seconds;
    CHECK(num_instants(p) == 1);

    p.sensing_quantum_seconds = 1.5e-4;
    CHECK(num_instants(p) == 2);

    // quotient that is an integer only up to roundoff must not lose a step
    p.slot_seconds = 0.3;
    p.sensing_quantum_seconds = 0.1;
    CHECK(num_instants(p) == 3);
}

TEST_CASE("spectral efficiency at full and half slot") {
    SystemParams p = oracle::reference_params();
    CHECK(spectral_efficiency(p, 4e-4) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(spectral_efficiency(p, 2e-4) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(spectral_efficiency(p, 0.0) == kInfiniteRate);
    CHECK_THROWS_AS(spectral_efficiency(p, -1e-9), std::domain_error);
}

TEST_CASE("slot-length success probabilities match frozen references") {
    SystemParams p = oracle::reference_params();
    double pp = success_probability(p, LinkId::Primary, p.slot_seconds);
    double ps = success_probability(p, LinkId::Secondary, p.slot_seconds);
    CHECK(oracle::near(pp, 0.5322, 1e-4));
    CHECK(oracle::near(ps, 0.99790, 1e-4));
    CHECK(oracle::near(pp, oracle::frozen::pp_T, 1e-12));
    CHECK(oracle::near(ps, oracle::frozen::ps_T, 1e-12));
}

TEST_CASE("per-instant secondary success values and window close") {
    SystemParams p = oracle::reference_params();
    for (std::size_t k = 0; k <= 10; ++k) {
        double tx = transmission_seconds(p, k);
        double ps = success_probability(p, LinkId::Secondary, tx);
        CHECK(oracle::near(ps, oracle::frozen::ps_tail[k], 1e-12));
    }
    CHECK(transmission_seconds(p, 10) == 0.0);
    CHECK(success_probability(p, LinkId::Secondary, 0.0) == 0.0);
    CHECK(success_probability(p, LinkId::Primary, 0.0) == 0.0);
}

TEST_CASE("success probability is monotone in window, power, and fading variance") {
    SystemParams p = oracle::reference_params();
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        double t1 = 1e-5 + rng.uniform() * 4e-4;
        double t2 = 1e-5 + rng.uniform() * 4e-4;
        if (t1 > t2) std::swap(t1, t2);
        double ps1 = success_probability(p, LinkId::Secondary, t1);
        double ps2 = success_probability(p, LinkId::Secondary, t2);
        CHECK(ps1 <= ps2 + 1e-15);
        CHECK(ps1 > 0.0);
        CHECK(ps2 < 1.0);

        SystemParams hot = p;
        hot.power_secondary = p.power_secondary * (1.0 + rng.uniform());
        CHECK(success_probability(hot, LinkId::Secondary, t1) >= ps1);

        SystemParams lucky = p;
        lucky.var_secondary_link = p.var_secondary_link * (1.0 + rng.uniform());
        CHECK(success_probability(lucky, LinkId::Secondary, t1) >= ps1);
    }
}

TEST_CASE("draw_success frequency matches the closed form") {
    SystemParams p = oracle::reference_params();
    const std::uint64_t n = 1'000'000;
    Rng rng(123);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i)
        if (draw_success(rng, p, LinkId::Primary, p.slot_seconds)) ++hits;
    double freq = static_cast<double>(hits) / static_cast<double>(n);
    double prob = success_probability(p, LinkId::Primary, p.slot_seconds);
    double se = std::sqrt(prob * (1.0 - prob) / static_cast<double>(n));
    CHECK(std::abs(freq - prob) <= 3.0 * se);

    Rng dead(7);
    for (int i = 0; i < 100; ++i)
        CHECK_FALSE(draw_success(dead, p, LinkId::Secondary, 0.0));
}

TEST_CASE("draw_success is deterministic for a fixed seed") {
    SystemParams p = oracle::reference_params();
    Rng a(99), b(99);
    for (int i = 0; i < 1000; ++i)
        CHECK(draw_success(a, p, LinkId::Secondary, 2e-4) ==
              draw_success(b, p, LinkId::Secondary, 2e-4));
}

TEST_CASE("independent Monte Carlo fading oracle agrees with the closed form") {
    SystemParams p = oracle::reference_params();
    const std::uint64_t n = 1'000'000;
    for (auto link : {LinkId::Primary, LinkId::Secondary}) {
        double prob = success_probability(p, link, p.slot_seconds);
        double freq =
            oracle::mc_success_frequency(2024, p, link, p.slot_seconds, n);
        double se = std::sqrt(prob * (1.0 - prob) / static_cast<double>(n));
        CHECK(std::abs(freq - prob) <= 3.0 * se);
    }
}

TEST_CASE("SystemParams validation names the offending field") {
    SystemParams p = oracle::reference_params();
    p.bandwidth_hz = -1.0;
    try {
        p.validate();
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("bandwidth_hz") != std::string::npos);
    }

    SystemParams q = oracle::reference_params();
    q.sensing_quantum_seconds = q.slot_seconds * 2.0;
    try {
        q.validate();
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("sensing_quantum_seconds") !=
              std::string::npos);
    }

    CHECK_NOTHROW(oracle::reference_params().validate());
}
