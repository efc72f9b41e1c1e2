#pragma once

#include <stdexcept>
#include <string>

#include "homtom/homodyne.hpp"
#include "homtom/states.hpp"
#include "homtom/tomography.hpp"

namespace homtom {

/// Raised for malformed or invalid experiment configuration; the message
/// names the offending field.  Maps to exit code 1 in the front end.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    int modes = 1;

    // state
    std::string state_kind = "vacuum";  // vacuum | coherent | fock | squeezed
    ModeVector amplitudes;              // coherent
    int fock_n = 1;                     // fock
    ModeVector state_mode;              // fock / squeezed mode shape, defaults to the LO mode
    double xi = 0.0;                    // squeezed

    // local oscillator
    double gamma0 = 100.0;
    ModeVector gamma_mode;  // defaults to the first basis mode
    int n_theta = 64;

    // detector
    DetectorKind det_kind = DetectorKind::bucket;
    double eta = 1.0;
    ModeVector det_mode;  // single_mode kind, defaults to the LO mode

    // output grid and transform numerics
    GridParams grid;
    double epsilon_reg = 0.0;  // 0 picks the default exclusion radius

    // comparison tolerances; l2 <= 0 disables that gate
    double sup_tol = 1e-2;
    double norm_tol = 1e-3;
    double l2_tol = 0.0;

    // figure families
    std::vector<double> fig_mu;  // |mu| values, default {0, 0.25, 0.5, 0.75, 1}
    double fig_xi_max = 4.0;
    int fig_points = 81;

    GaussianState make_state() const;
    LocalOscillator make_lo(double theta = 0.0) const;
    DetectorModel make_detector() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace homtom
