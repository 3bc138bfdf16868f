#pragma once

#include <string>
#include <vector>

#include "cogmac/config.hpp"

namespace cogmac {

struct SweepRow {
    double lambda = 0.0;
    ProtocolVariant variant = ProtocolVariant::Proposed;
    OptimizationResult opt;
    bool simulated = false;
    SimMetrics sim;                // meaningful only when simulated
    double z_mu_p = 0.0, z_mu_s = 0.0, z_p_empty = 0.0, z_delay = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by (lambda index, variant order)
    std::string csv;             // byte-identical for identical config + seeds
    double worst_abs_z = 0.0;
    bool z_flagged = false;      // some finite simulation |z| exceeded 3
};

// Optimizes every (lambda, variant) cell, optionally validates each feasible
// policy by simulation, and renders the CSV table. Row work parallelizes over
// jobs; output is independent of jobs.
SweepResult run_sweep(const RunConfig& config, int jobs = 1,
                      const std::string& config_text = "");

} // namespace cogmac
