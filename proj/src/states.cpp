#include "homtom/states.hpp"

#include <cmath>
#include <stdexcept>

namespace homtom {

GaussianState coherent_wigner(const CoherentSpec& spec) {
    const auto m = spec.phi.size();
    if (m < 1) throw std::invalid_argument("coherent_wigner: empty parameter function");
    GaussianState s{Kernel::Identity(m, m), Kernel::Zero(m, m), spec.phi, 0.0};
    s.validate();
    return s;
}

FockFamilyPoint fock_generating_point(const ModeVector& f, Complex j) {
    if (!is_normalized(f)) throw std::invalid_argument("fock_generating: parameter function not normalized");
    if (std::abs(j) >= 1.0) throw std::invalid_argument("fock_generating: |J| must be below 1");
    const auto m = f.size();
    const Complex h = 2.0 * j / (1.0 + j);
    FockFamilyPoint p;
    p.quadA = Kernel::Identity(m, m) - h * (f * f.adjoint());
    p.logPrefactor = -std::log(1.0 + j);
    return p;
}

GaussianState fock_generating(const FockSpec& spec) {
    if (spec.j < 0.0 || spec.j >= 1.0)
        throw std::invalid_argument("fock_generating: J must lie in [0, 1)");
    const FockFamilyPoint p = fock_generating_point(spec.f, Complex(spec.j, 0.0));
    const auto m = spec.f.size();
    GaussianState s{p.quadA, Kernel::Zero(m, m), ModeVector::Zero(m), p.logPrefactor.real()};
    s.validate();
    return s;
}

Kernel squeeze_kernel_a(double xi, const ModeVector& theta) {
    if (!is_normalized(theta)) throw std::invalid_argument("squeeze_kernel_a: mode not normalized");
    const auto m = theta.size();
    const double sh = std::sinh(0.5 * xi);
    return Kernel::Identity(m, m) + (2.0 * sh * sh) * (theta * theta.adjoint());
}

Kernel squeeze_kernel_b(double xi, const ModeVector& theta) {
    if (!is_normalized(theta)) throw std::invalid_argument("squeeze_kernel_b: mode not normalized");
    return std::sinh(xi) * (theta * theta.transpose());
}

GaussianState squeezed_vacuum(const SqueezeSpec& spec) {
    if (spec.xi < 0.0) throw std::invalid_argument("squeezed_vacuum: Xi must be nonnegative");
    GaussianState s;
    if (spec.explicit_kernels()) {
        const auto m = spec.a.rows();
        if (m < 1 || spec.a.cols() != m || spec.b.rows() != m || spec.b.cols() != m)
            throw std::invalid_argument("squeezed_vacuum: bad kernel dimensions");
        s = GaussianState{spec.a, spec.b, ModeVector::Zero(m), 0.0};
        s.validate();
        // Explicit kernels need not describe a pure state; normalize so the
        // trace is exactly 1.
        const Complex tr = state_trace(s);
        if (!(tr.real() > 0.0))
            throw std::runtime_error("squeezed_vacuum: explicit kernels give nonpositive trace");
        s.logPrefactor = -std::log(tr.real());
    } else {
        const auto m = spec.theta.size();
        s = GaussianState{squeeze_kernel_a(spec.xi, spec.theta), squeeze_kernel_b(spec.xi, spec.theta),
                          ModeVector::Zero(m), 0.0};
        s.validate();
    }
    return s;
}

}  // namespace homtom
