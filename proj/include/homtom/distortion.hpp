#pragma once

#include <complex>
#include <functional>

#include "homtom/core.hpp"
#include "homtom/states.hpp"
#include "homtom/tomography.hpp"

namespace homtom {

/// Resolution increment of the measurement chain (inverse oscillator
/// amplitude) together with the detector efficiency.
struct KernelParams {
    double dx = 0.0;
    double eta = 1.0;
    void validate() const;
};

/// Overlap of the state's mode with the oscillator mode.  The orthogonal
/// weight and the interpolation parameter follow from |mu|.
struct MismatchSpec {
    Complex mu;
    double nu() const;     // sqrt(1 - |mu|^2), taken real nonnegative
    double omega() const;  // 2|mu|^2 - 1
    void validate() const;
};

using WignerClosure = std::function<double(double, double)>;

/// Intrinsic resolution kernel of the measurement chain.  Scale invariant
/// under (q0,p0,q,p) -> s(q0,p0,q,p) up to s^-2 and normalized over the
/// output plane.
double kappa(double q0, double p0, double q, double p, const KernelParams& kp);

/// Superposition integral W'(q,p) = int kappa(q0,p0,q,p) W0(q0,p0) dq0 dp0
/// with an excluded disk of radius 3 dx around the input origin, where the
/// kernel is singular.  Warns when the excluded region holds weight.
WignerGrid superpose(const WignerClosure& w0, const KernelParams& kp, const GridParams& gp);
double superpose_at(const WignerClosure& w0, const KernelParams& kp, double q, double p);

/// Same integral after pinning the kernel width to the output radius,
/// which turns it into a position-dependent Gaussian blur.
WignerGrid approx_convolve(const WignerClosure& w0, const KernelParams& kp, const GridParams& gp);
double approx_convolve_at(const WignerClosure& w0, const KernelParams& kp, double q, double p);

/// Observed coherent state in rescaled coordinates: a Gaussian of the
/// original shape whose width grew by dw.
struct CoherentObserved {
    Complex alpha1;  // in-mode amplitude
    double dw = 0.0;
    double value(double q, double p) const;
};

/// Bucket detection: dw is fed by the photons orthogonal to the
/// oscillator mode.
CoherentObserved coherent_bucket_observed(const ModeVector& phi, const ModeVector& gamma,
                                          const KernelParams& kp);

/// Single-mode detection: dw is fed by the in-mode photons instead.
CoherentObserved coherent_single_mode_observed(const ModeVector& phi, const ModeVector& gamma,
                                               const KernelParams& kp);

double laguerre(int n, double x);

/// Traced generating function for number states seen through a mismatched
/// mode, as a function of |alpha0|^2.
double fock_traced_generating(const MismatchSpec& mm, double j, double alpha0_sq);

/// Polynomial part of the observed number-state Wigner function relative
/// to the Gaussian envelope 2 e^{-q^2-p^2}.  Evaluated in a form that
/// stays finite at |mu|^2 = 1/2 where the written closed form degenerates.
double fock_observed_envelope_ratio(int n, const MismatchSpec& mm, double rho_sq);

/// Observed number-state Wigner density in coordinates rescaled by eta.
double fock_observed_wigner(int n, const MismatchSpec& mm, double eta, double q, double p);

/// Generating function of the observed marginals; the naive flag selects
/// the variant obtained by substituting the oscillator mode directly into
/// the state instead of tracing.
Complex fock_marginal_generating(const MismatchSpec& mm, Complex j, double q, bool naive);

/// n-th marginal by contour extraction from the generating function.
double fock_marginal(int n, const MismatchSpec& mm, double q, bool naive);

/// Squeezed-state kernels split along the oscillator mode: the retained
/// overlaps, the complement blocks, and the cross couplings that feed the
/// trace distortion.
struct SqueezeSeparation {
    ModeVector u, v;
    Kernel a_q, b_qq;
    Complex g_a, g_b, g_e;
};

SqueezeSeparation squeezed_separation(const Kernel& a, const Kernel& b, const ModeVector& gamma);
SqueezeSeparation squeezed_separation(const SqueezeSpec& spec, const ModeVector& gamma);

/// Coefficients of the observed squeezed Gaussian after tracing out the
/// complement modes.  The trace shifts the naive overlaps g by h and
/// scales the whole function by exp(log_norm).
struct SqueezeDistortion {
    Complex g_a, g_b, g_e;
    double g_u = 0.0, g_v = 0.0;  // norms of the cross couplings
    Complex h_a, h_b;
    double log_norm = 0.0;

    Complex a_eff() const { return g_a - h_a; }
    Complex b_eff() const { return g_b - h_b; }
    Complex g_c() const;
    double g_d(double alpha_sq, double dx) const;
};

SqueezeDistortion squeezed_trace_coeffs(const SqueezeSeparation& sep);

/// Observed squeezed Wigner density including the finite-resolution
/// broadening at second order in dx.
struct SqueezedObserved {
    SqueezeDistortion coeffs;
    KernelParams kp;
    double value(double q, double p) const;
};

SqueezedObserved squeezed_observed(const SqueezeDistortion& coeffs, const KernelParams& kp);

/// Closed form for a single squeezed mode seen through a mismatched
/// oscillator mode, with dx = 0.
double single_mode_squeezed_observed(double xi, const MismatchSpec& mm, double q, double p);

double purity(double xi, const MismatchSpec& mm);
double sigma_min(double xi, const MismatchSpec& mm);

/// Quartic remainder 2 g_e - |g_b|^2 of the weak-squeezing trace factor.
/// Treated as zero below xi = 0.3, where it is beneath any of the other
/// tolerances in play.
double weak_squeezing_gv2(double xi);

struct MomentStats {
    double purity = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double mean_q = 0.0;
    double mean_p = 0.0;
};

/// Purity and principal standard deviations of a Wigner grid from its
/// second moments, normalized so a pure Gaussian scores purity 1.
MomentStats moment_stats(const WignerGrid& g);

}  // namespace homtom
