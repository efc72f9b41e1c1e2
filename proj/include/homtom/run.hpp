#pragma once

#include <string>

#include "homtom/config.hpp"
#include "homtom/distortion.hpp"
#include "homtom/tomography.hpp"

namespace homtom {

struct ComparisonReport {
    double sup_error = 0.0;
    double l2_error = 0.0;
    double norm_residual_sim = 0.0;
    double norm_residual_ref = 0.0;
    MomentStats sim_stats;
    MomentStats ref_stats;
    bool pass = false;
};

/// Closed-form observed Wigner grid for the configured experiment, in the
/// same raw convention the reconstruction produces (no 1/eta rescale).
WignerGrid analytic_grid(const ExperimentConfig& cfg);

/// Measurement-chain route: count statistics, correlation, transform.
WignerGrid simulate_grid(const ExperimentConfig& cfg);

int cmd_analytic(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_compare(const ExperimentConfig& cfg, const std::string& out_dir,
                ComparisonReport* report = nullptr);
int cmd_figures(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace homtom
