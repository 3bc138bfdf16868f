#include "cogmac/sensing.hpp"

#include <stdexcept>

namespace cogmac {

const RocEntry& SensingProfile::roc_at(std::size_t k) const {
    if (k < 1 || k > entries.size()) {
        throw std::out_of_range("SensingProfile index " + std::to_string(k) +
                                " outside [1, " + std::to_string(entries.size()) + "]");
    }
    return entries[k - 1];
}

SensingProfile default_profile(std::size_t m) {
    if (m != 10) {
        throw std::invalid_argument(
            "no built-in profile for m = " + std::to_string(m) +
            "; supply a custom profile in the config file");
    }
    return SensingProfile{{
        {0.2, 0.2},
        {0.19, 0.19},
        {0.17, 0.17},
        {0.15, 0.15},
        {0.13, 0.13},
        {0.12, 0.12},
        {0.08, 0.08},
        {0.05, 0.05},
        {0.01, 0.01},
        {0.001, 0.001},
    }};
}

namespace {

void check_ranges(const SensingProfile& profile, std::vector<std::string>& out) {
    for (std::size_t k = 1; k <= profile.size(); ++k) {
        const auto& e = profile.entries[k - 1];
        if (!(e.p_fa >= 0.0 && e.p_fa <= 1.0)) {
            out.push_back("p_fa(" + std::to_string(k) + ") outside [0,1]");
        }
        if (!(e.p_md >= 0.0 && e.p_md <= 1.0)) {
            out.push_back("p_md(" + std::to_string(k) + ") outside [0,1]");
        }
    }
}

void check_monotone(const SensingProfile& profile, std::vector<std::string>& out) {
    for (std::size_t k = 2; k <= profile.size(); ++k) {
        const auto& prev = profile.entries[k - 2];
        const auto& cur = profile.entries[k - 1];
        if (cur.p_fa > prev.p_fa) {
            out.push_back("p_fa increases at k=" + std::to_string(k));
        }
        if (cur.p_md > prev.p_md) {
            out.push_back("p_md increases at k=" + std::to_string(k));
        }
    }
}

} // namespace

std::vector<std::string> validate(const SensingProfile& profile) {
    std::vector<std::string> out;
    if (profile.size() == 0) out.push_back("profile is empty");
    check_ranges(profile, out);
    check_monotone(profile, out);
    return out;
}

std::vector<std::string> validate_ranges(const SensingProfile& profile) {
    std::vector<std::string> out;
    if (profile.size() == 0) out.push_back("profile is empty");
    check_ranges(profile, out);
    return out;
}

} // namespace cogmac
