#pragma once

#include <functional>
#include <vector>

#include "homtom/core.hpp"

namespace homtom {

enum class DetectorKind { bucket, single_mode };

/// Photon-number resolving detector pair, either flat response over all
/// modes or projecting onto a single mode before counting.
struct DetectorModel {
    DetectorKind kind = DetectorKind::bucket;
    double eta = 1.0;
    ModeVector mode;  // single_mode kind only, normalized

    void validate(Eigen::Index modes) const;
    Kernel d_kernel(Eigen::Index modes) const;
    double lambda(Eigen::Index modes) const;  // tr D
};

struct LocalOscillator {
    double gamma0 = 0.0;   // field magnitude, sets the resolution 1/gamma0
    double theta = 0.0;    // scan phase; 0 measures the position quadrature
    ModeVector gamma_mode; // normalized mode shape

    void validate() const;
    double dx() const { return 1.0 / gamma0; }

    /// Full field gamma0 e^{i(theta - pi/2)} Gamma.  The -pi/2 offset fixes
    /// the gauge so theta = 0 projects onto q rather than p.
    ModeVector field() const;
};

struct PhotonDistribution {
    std::vector<double> p;  // p[n], n = 0..N
    void validate() const;
    double total() const;
};

/// Signed-index correlation array R(m), m = -n_max..n_max.
struct CrossCorrelation {
    std::vector<double> r;
    int n_max = 0;
    double at(int m) const;
};

struct QuadratureDistribution {
    double theta = 0.0;
    std::vector<double> x;  // uniform grid
    std::vector<double> r;  // density, integrates to 1
    void validate() const;
};

struct MkJk {
    Complex m;
    Complex j;
};
/// M = 4K/(1+K)^2 and J = (1-K)/(1+K); on the unit circle J = -i tan(phi/2).
MkJk mk_jk(Complex k);

CrossCorrelation cross_correlate(const PhotonDistribution& p1, const PhotonDistribution& p2);

using GeneratingFn = std::function<Complex(Complex)>;
/// Product form G1(K) G2(1/K) of the difference-count generating function.
Complex generating_product(const GeneratingFn& g1, const GeneratingFn& g2, Complex k);

/// Gaussian exponent data fed to the forward chain.  Same layout as
/// GaussianState but with a complex prefactor so analytic continuations of
/// generating families can ride the identical code path.
struct ForwardInput {
    Kernel quadA;
    Kernel quadB;
    ModeVector displacement;
    Complex logPrefactor = 0.0;
};
ForwardInput forward_input(const GaussianState& s);

Complex homodyne_generating(const ForwardInput& in, const LocalOscillator& lo,
                            const DetectorModel& det, Complex k);
Complex homodyne_generating(const GaussianState& s, const LocalOscillator& lo,
                            const DetectorModel& det, Complex k);

/// Full correlation sweep R(m), m = -n_max..n_max, by phase-grid quadrature
/// of the generating function.  Complex values are kept so generating-family
/// inputs work; physical states give values real to rounding.
struct CorrelationSweep {
    std::vector<Complex> r;
    int n_max = 0;
    Complex at(int m) const;
};
CorrelationSweep extract_R_sweep(const ForwardInput& in, const LocalOscillator& lo,
                                 const DetectorModel& det, int n_max);

double extract_R(const GaussianState& s, const LocalOscillator& lo, const DetectorModel& det,
                 int n);

/// Difference counts rescaled to a quadrature density at scan phase theta.
/// x_max is the half-width of the count window in units of the oscillator
/// resolution; the grid itself is in quadrature units.
QuadratureDistribution quadrature_distribution(const GaussianState& s, const LocalOscillator& lo,
                                               const DetectorModel& det, double theta,
                                               double x_max = 8.0);

/// Sesquilinear exponent blocks of a two-system form
/// a*.aa.a + a*.ab.b + b*.ba.a + b*.bb.b.
struct PairQuadForm {
    Kernel aa, ab, ba, bb;
};
/// Substitution of the splitter output variables (a+ib)/sqrt2, (b+ia)/sqrt2.
PairQuadForm beamsplitter_forward(const PairQuadForm& f);
PairQuadForm beamsplitter_inverse(const PairQuadForm& f);

}  // namespace homtom
