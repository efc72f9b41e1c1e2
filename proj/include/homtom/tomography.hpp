#pragma once

#include <string>
#include <vector>

#include "homtom/core.hpp"
#include "homtom/homodyne.hpp"

namespace homtom {

/// One angle of the characteristic function, sampled on a signed uniform
/// r-grid centered on zero (odd point count).
struct CharacteristicSlice {
    double theta = 0.0;
    std::vector<double> r;
    std::vector<Complex> chi;
    double clipped_fraction = 0.0;
    bool clip_warning = false;

    void validate() const;
};

struct WignerGrid {
    std::vector<double> q;
    std::vector<double> p;
    Eigen::MatrixXd w;  // w(i, j) = W(q[i], p[j])
    std::string convention = "density";  // integrates to 1 against dq dp / 2pi

    double value_at(double q0, double p0) const;  // nearest grid node
};

struct GridMoments {
    double mass = 0.0;
    double mean_q = 0.0, mean_p = 0.0;
    double var_q = 0.0, var_p = 0.0, cov_qp = 0.0;
};
GridMoments grid_moments(const WignerGrid& g);

struct GridParams {
    int n_theta = 64;
    double q_max = 6.0;
    int n_q = 241;
    double r_max = 24.0;
    double dr = 0.025;
    double x_max = 8.0;
    bool full_circle = false;  // scan theta over [0, 2pi) instead of [0, pi)
};

/// Oscillatory transform of one marginal onto the r-grid.  Warns through the
/// clip flag when the tail of chi has not decayed at r_max.
CharacteristicSlice characteristic_from_marginal(const QuadratureDistribution& rx, double r_max,
                                                 double dr);

/// Zero the slice outside the band |r| < pi gamma0 that the count window can
/// actually reach, recording how much energy was discarded.
CharacteristicSlice clip_boundary(const CharacteristicSlice& slice, double gamma0);

/// Filtered back-projection of a uniform fan of slices onto a Cartesian
/// Wigner grid.  Slices must share one r-grid; the ramp-filter kink at r = 0
/// is removed by an internal two-resolution extrapolation.
WignerGrid symplectic_fourier(const std::vector<CharacteristicSlice>& slices,
                              const GridParams& gp);

/// Same transform through polar-to-Cartesian interpolation and a separable
/// Fourier sum; slower, structurally independent, used to cross-check the
/// back-projection route.
WignerGrid symplectic_fourier_cartesian(const std::vector<CharacteristicSlice>& slices,
                                        const GridParams& gp);

/// Full measurement-and-inversion chain ending in the observed Wigner grid.
WignerGrid reconstruct(const GaussianState& s, const LocalOscillator& lo,
                       const DetectorModel& det, const GridParams& gp);

}  // namespace homtom
