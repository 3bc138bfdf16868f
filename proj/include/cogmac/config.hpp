#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cogmac/channel.hpp"
#include "cogmac/optimizer.hpp"
#include "cogmac/sensing.hpp"
#include "cogmac/simulator.hpp"

namespace cogmac {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct LambdaGrid {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.01;

    std::vector<double> values() const;  // inclusive endpoints, tolerant of one-ulp ratios
};

struct RunConfig {
    SystemParams system;
    SensingProfile profile;
    double delay_cap = 0.0;
    LambdaGrid lambda_grid;
    std::vector<ProtocolVariant> variants;
    OptimizerSettings optimizer;
    std::optional<SimConfig> simulation;
    std::string output_path;
};

struct ParsedConfig {
    RunConfig config;
    std::vector<std::string> warnings;  // populated when checks are downgraded
};

// Strict parse of the sectioned key = value format documented in the README.
// Unknown sections or keys, duplicates, and invariant violations are all
// ConfigError; allow_nonmonotone_roc turns the ROC monotonicity check into a
// warning. source_name prefixes diagnostics.
ParsedConfig parse_config(const std::string& text, bool allow_nonmonotone_roc = false,
                          const std::string& source_name = "<config>");

// Profile rows in config syntax; parse_config applied to a [profile] section
// built from this text reproduces the profile exactly.
std::string serialize_profile(const SensingProfile& profile);

std::uint64_t fnv1a64(const std::string& text);

} // namespace cogmac
