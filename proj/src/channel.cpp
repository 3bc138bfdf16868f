#include "cogmac/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cogmac {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        throw std::invalid_argument(std::string("SystemParams.") + name + " must be > 0");
    }
}

double link_power(const SystemParams& p, LinkId link) {
    return link == LinkId::Primary ? p.power_primary : p.power_secondary;
}

double link_variance(const SystemParams& p, LinkId link) {
    return link == LinkId::Primary ? p.var_primary_link : p.var_secondary_link;
}

} // namespace

void SystemParams::validate() const {
    require_positive(noise_density, "noise_density");
    require_positive(power_primary, "power_primary");
    require_positive(power_secondary, "power_secondary");
    require_positive(bandwidth_hz, "bandwidth_hz");
    require_positive(slot_seconds, "slot_seconds");
    require_positive(sensing_quantum_seconds, "sensing_quantum_seconds");
    require_positive(packet_bits, "packet_bits");
    require_positive(var_primary_link, "var_primary_link");
    require_positive(var_secondary_link, "var_secondary_link");
    if (sensing_quantum_seconds > slot_seconds) {
        throw std::invalid_argument(
            "SystemParams.sensing_quantum_seconds must not exceed slot_seconds");
    }
}

std::size_t num_instants(const SystemParams& params) {
    // The +1e-9 tolerates one-ulp ratios like T/tau = 9.999...8 when tau = T/10.
    return static_cast<std::size_t>(
        std::floor(params.slot_seconds / params.sensing_quantum_seconds + 1e-9));
}

double spectral_efficiency(const SystemParams& params, double tx_seconds) {
    if (tx_seconds < 0.0) throw std::domain_error("transmission time must be >= 0");
    if (tx_seconds == 0.0) return kInfiniteRate;
    return params.packet_bits / (params.bandwidth_hz * tx_seconds);
}

double success_probability(const SystemParams& params, LinkId link, double tx_seconds) {
    const double rate = spectral_efficiency(params, tx_seconds);
    if (rate == kInfiniteRate) return 0.0;
    const double snr_term = params.noise_density * (std::exp2(rate) - 1.0) /
                            (link_variance(params, link) * link_power(params, link));
    return std::exp(-snr_term);
}

bool draw_success(Rng& rng, const SystemParams& params, LinkId link, double tx_seconds) {
    const double rate = spectral_efficiency(params, tx_seconds);
    if (rate == kInfiniteRate) return false;
    const double gain_sq = rng.exponential(link_variance(params, link));
    const double capacity =
        std::log2(1.0 + link_power(params, link) * gain_sq / params.noise_density);
    return capacity > rate;
}

double transmission_seconds(const SystemParams& params, std::size_t k) {
    const double tx =
        params.slot_seconds - static_cast<double>(k) * params.sensing_quantum_seconds;
    if (tx <= params.slot_seconds * 1e-12) return 0.0;
    return tx;
}

} // namespace cogmac
