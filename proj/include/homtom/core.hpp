#pragma once

#include <complex>

#include <Eigen/Dense>

// Finite-mode linear algebra for the measurement-chain simulator.
//
// Conventions used throughout the library:
//  * a mode-space "kernel" is an M x M complex matrix acting on mode
//    amplitude vectors; contraction of kernels is plain matrix product.
//  * the functional measure is normalized per mode so that the vacuum
//    Gaussian integrates to exactly 1; no loose normalization constants
//    are carried around.
//  * quadrature variables follow W_vac(q,p) = 2 exp(-(q^2+p^2)) with
//    Int W dq dp / (2 pi) = 1 and alpha = (q + i p)/sqrt(2).

namespace homtom {

using Complex = std::complex<double>;
using ModeVector = Eigen::VectorXcd;
using Kernel = Eigen::MatrixXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kIdempotentTol = 1e-10;
// Below this eigenvalue threshold a quadratic form counts as non-positive
// and integration fails; inputs are never regularized silently.
inline constexpr double kPositiveEigThreshold = 1e-10;

/// Dimension bookkeeping for one computation; every Kernel and ModeVector
/// participating in a contraction must share this dimension.
struct ModeSpace {
    int dim;

    explicit ModeSpace(int m);
    Kernel identity() const;
    ModeVector basis(int i) const;  // e_i, zero-based
    ModeVector zero() const;
};

bool is_hermitian(const Kernel& k, double tol = kHermitianTol);
bool is_symmetric(const Kernel& k, double tol = kHermitianTol);
bool is_idempotent(const Kernel& k, double tol = kIdempotentTol);
bool is_normalized(const ModeVector& v, double tol = 1e-12);

/// sum_ij conj(a_i) K_ij b_j; the left argument is conjugated.
Complex diamond(const ModeVector& a, const Kernel& k, const ModeVector& b);
/// sum_i conj(a_i) b_i
Complex diamond(const ModeVector& a, const ModeVector& b);
/// sum_ij a_i K_ij b_j with no conjugation; pairs with the symmetric
/// B-type kernels whose contractions conjugate neither side.
Complex bilinear(const ModeVector& a, const Kernel& k, const ModeVector& b);

struct ProjectorPair {
    Kernel p;  // onto the given mode
    Kernel q;  // complement
};

/// P = Gamma Gamma*, Q = 1 - P for a normalized mode function.
ProjectorPair projectors(const ModeVector& gamma);

struct DetInv {
    Complex det;
    Kernel inv;
};

/// Determinant and inverse of 1 + c v v* from the rank-1 update
/// identities: det = 1 + c|v|^2, inv = 1 - c v v*/(1 + c|v|^2).
DetInv rank1_det_inv(Complex c, const ModeVector& v);

/// Gaussian phase-space representation
///   e^{logPrefactor} exp(-2 (a-d)*.A.(a-d) - (a-d)*.B.(a-d)* - (a-d).B*.(a-d))
/// with A hermitian and B symmetric so the functional is real valued.
struct GaussianState {
    Kernel quadA;
    Kernel quadB;
    ModeVector displacement;
    double logPrefactor = 0.0;

    int modes() const { return static_cast<int>(quadA.rows()); }
    void validate() const;
};

GaussianState vacuum_state(int modes);

struct GaussianIntegralResult {
    Complex logAmplitude;  // -(log det A_q + log det K)/2
    Complex exponent;      // source-dependent part of the closed form
    Complex value() const { return std::exp(logAmplitude + exponent); }
};

/// Closed form of
///   Int exp(-2 b*.Aq.b + b*.Bqq.b* + b.Bqq*.b + u*.b + b*.v) D[b]
/// over M complex modes, in the measure convention where Aq = 1, Bqq = 0
/// gives exactly 1.  Aq may be non-hermitian (analytic continuation in a
/// generating parameter) as long as the real part of the quadratic form
/// stays positive definite.
GaussianIntegralResult gaussian_integral(const Kernel& aq, const Kernel& bqq,
                                         const ModeVector& u, const ModeVector& v);

/// Same integral against a state in its own exponent convention
/// (minus signs, displacement, prefactor), times exp(u*.b + b*.v).
GaussianIntegralResult state_integral(const GaussianState& s, const ModeVector& u,
                                      const ModeVector& v);

Complex state_trace(const GaussianState& s);

/// Branch-stable log determinant: sum of principal logs of the
/// eigenvalues.  For matrices whose numerical range stays in the right
/// half plane this tracks the analytic branch through complex
/// continuation, which plain log(det) does not.
Complex log_det(const Kernel& k);

/// Throws if the real 2M-dimensional quadratic form of the integrand
/// above is not positive definite beyond the configured threshold.
void require_integrable(const Kernel& aq, const Kernel& bqq);

}  // namespace homtom
