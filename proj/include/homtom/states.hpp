#pragma once

#include "homtom/core.hpp"

namespace homtom {

struct CoherentSpec {
    ModeVector phi;  // spectral parameter function; zero norm gives vacuum
};

/// Fock states enter only through a generating parameter J; n-photon
/// quantities are Taylor coefficients in J extracted elsewhere by contour
/// quadrature.
struct FockSpec {
    ModeVector f;  // normalized parameter function
    double j = 0.0;
};

/// Squeezed vacuum, either in single-mode form (Xi, Theta) or through
/// explicit kernels A and B.
struct SqueezeSpec {
    double xi = 0.0;
    ModeVector theta;  // empty when explicit kernels are used
    Kernel a;          // used only when theta is empty
    Kernel b;

    bool explicit_kernels() const { return theta.size() == 0; }
};

GaussianState coherent_wigner(const CoherentSpec& spec);

GaussianState fock_generating(const FockSpec& spec);

/// Analytic continuation of the generating family to complex J, needed by
/// the contour extraction of n-photon quantities.  The quadratic kernel
/// becomes non-hermitian and the prefactor complex, so the result does not
/// fit the GaussianState invariants.
struct FockFamilyPoint {
    Kernel quadA;  // 1 - (2J/(1+J)) F F*
    Complex logPrefactor;
};
FockFamilyPoint fock_generating_point(const ModeVector& f, Complex j);

GaussianState squeezed_vacuum(const SqueezeSpec& spec);

/// A = 1 + 2 sinh^2(Xi/2) Theta Theta*
Kernel squeeze_kernel_a(double xi, const ModeVector& theta);
/// B = sinh(Xi) Theta Theta (plain outer product, symmetric)
Kernel squeeze_kernel_b(double xi, const ModeVector& theta);

}  // namespace homtom
