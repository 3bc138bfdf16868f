#pragma once

#include <cstddef>
#include <limits>

#include "cogmac/rng.hpp"

namespace cogmac {

// Physical and slot constants of the shared channel.
struct SystemParams {
    double noise_density;            // W/Hz
    double power_primary;            // W/Hz
    double power_secondary;          // W/Hz
    double bandwidth_hz;
    double slot_seconds;
    double sensing_quantum_seconds;
    double packet_bits;
    double var_primary_link;         // Rayleigh fading variance, primary link
    double var_secondary_link;       // Rayleigh fading variance, secondary link

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class LinkId { Primary, Secondary };

inline constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();

// Number of sensing decision instants per slot, floor(T / tau).
std::size_t num_instants(const SystemParams& params);

// Spectral efficiency b / (W * tx). tx == 0 yields kInfiniteRate; tx < 0 throws.
double spectral_efficiency(const SystemParams& params, double tx_seconds);

// Packet success probability over a Rayleigh block-fading link: the complement
// of outage, exp(-N0 (2^R - 1) / (sigma P)). Zero transmission time carries no
// packet and returns exactly 0.
double success_probability(const SystemParams& params, LinkId link, double tx_seconds);

// One fading realization: draws |g|^2 ~ Exp(mean sigma) and tests the
// instantaneous capacity against the spectral rate. tx == 0 is always a miss.
bool draw_success(Rng& rng, const SystemParams& params, LinkId link, double tx_seconds);

// Transmission time left after k sensing quanta, clamped so that k quanta
// spanning the whole slot gives exactly 0 despite rounding.
double transmission_seconds(const SystemParams& params, std::size_t k);

} // namespace cogmac
