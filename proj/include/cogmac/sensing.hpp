#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cogmac {

// Detector operating point after k accumulated sensing quanta.
struct RocEntry {
    double p_fa;  // false alarm: idle channel declared busy
    double p_md;  // missed detection: active primary declared idle
};

// Energy-detector ROC indexed by accumulated quanta k = 1..M. Values must be
// non-increasing in k: more samples never hurt detection.
struct SensingProfile {
    std::vector<RocEntry> entries;  // entries[k-1] holds the pair for index k

    std::size_t size() const { return entries.size(); }

    // 1-based lookup; throws std::out_of_range outside [1, size()].
    const RocEntry& roc_at(std::size_t k) const;
};

// The built-in 10-instant profile. Any other m must come from a config file.
SensingProfile default_profile(std::size_t m);

// Every invariant violation found, as human-readable strings; empty means ok.
// Violations are data, not exceptions: the CLI downgrades the monotonicity
// check to a warning under --allow-nonmonotone-roc.
std::vector<std::string> validate(const SensingProfile& profile);

// As validate(), but only the range checks (used when monotonicity is waived).
std::vector<std::string> validate_ranges(const SensingProfile& profile);

} // namespace cogmac
