#include "homtom/distortion.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace homtom {

void KernelParams::validate() const {
    if (!(dx > 0.0)) throw std::invalid_argument("resolution increment must be positive");
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("efficiency must lie in (0, 1]");
}

double MismatchSpec::nu() const {
    const double m2 = std::norm(mu);
    return std::sqrt(std::max(0.0, 1.0 - m2));
}

double MismatchSpec::omega() const { return 2.0 * std::norm(mu) - 1.0; }

void MismatchSpec::validate() const {
    if (std::norm(mu) > 1.0 + 1e-12) throw std::invalid_argument("mode overlap exceeds 1");
}

double kappa(double q0, double p0, double q, double p, const KernelParams& kp) {
    kp.validate();
    const double r2 = q0 * q0 + p0 * p0;
    if (r2 < 1e-300) throw std::invalid_argument("kernel singular at origin");
    const double d2 = kp.dx * kp.dx;
    const double uq = q0 * kp.eta - q;
    const double up = p0 * kp.eta - p;
    return 2.0 / (r2 * M_PI * d2 * kp.eta) *
           std::exp(-2.0 * (uq * uq + up * up) / (r2 * d2 * kp.eta));
}

namespace {

// 32-point Gauss-Legendre rule on [-1, 1], nodes by Newton refinement.
struct GaussRule {
    std::array<double, 32> x{}, w{};
    GaussRule() {
        const int n = 32;
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double step = p1 / dp;
                t -= step;
                if (std::abs(step) < 1e-15) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x[static_cast<size_t>(i)] = -t;
            x[static_cast<size_t>(n - 1 - i)] = t;
            w[static_cast<size_t>(i)] = w[static_cast<size_t>(n - 1 - i)] =
                2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};

const GaussRule& gauss32() {
    static const GaussRule rule;
    return rule;
}

struct KernelSum {
    double value = 0.0;
    double excluded = 0.0;  // absolute weight lost to the origin disk
    double total = 0.0;     // absolute weight overall
};

KernelSum superpose_point(const WignerClosure& w0, const KernelParams& kp, double q, double p) {
    const auto& g = gauss32();
    const double eps = 3.0 * kp.dx;
    const double cq = q / kp.eta, cp = p / kp.eta;
    const double rho_c = std::hypot(cq, cp);
    const double sigma = rho_c * kp.dx / (2.0 * std::sqrt(kp.eta));
    const double hw = std::max(7.0 * sigma, 2.0 * eps);

    KernelSum out;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            const double q0 = cq + hw * g.x[static_cast<size_t>(i)];
            const double p0 = cp + hw * g.x[static_cast<size_t>(j)];
            if (q0 * q0 + p0 * p0 < 1e-300) continue;
            const double cell = hw * hw * g.w[static_cast<size_t>(i)] * g.w[static_cast<size_t>(j)];
            const double term = kappa(q0, p0, q, p, kp) * w0(q0, p0) * cell;
            out.total += std::abs(term);
            if (q0 * q0 + p0 * p0 < eps * eps) {
                out.excluded += std::abs(term);
            } else {
                out.value += term;
            }
        }
    return out;
}

WignerGrid blank_grid(const GridParams& gp) {
    WignerGrid grid;
    grid.q.resize(static_cast<size_t>(gp.n_q));
    const double dq = 2.0 * gp.q_max / (gp.n_q - 1);
    for (int i = 0; i < gp.n_q; ++i) grid.q[static_cast<size_t>(i)] = -gp.q_max + i * dq;
    grid.p = grid.q;
    grid.w = Eigen::MatrixXd::Zero(gp.n_q, gp.n_q);
    return grid;
}

}  // namespace

double superpose_at(const WignerClosure& w0, const KernelParams& kp, double q, double p) {
    return superpose_point(w0, kp, q, p).value;
}

WignerGrid superpose(const WignerClosure& w0, const KernelParams& kp, const GridParams& gp) {
    kp.validate();
    WignerGrid grid = blank_grid(gp);
    double excluded = 0.0, total = 0.0;
    for (int i = 0; i < gp.n_q; ++i)
        for (int j = 0; j < gp.n_q; ++j) {
            const auto s = superpose_point(w0, kp, grid.q[static_cast<size_t>(i)],
                                           grid.p[static_cast<size_t>(j)]);
            grid.w(i, j) = s.value;
            excluded += s.excluded;
            total += s.total;
        }
    if (total > 0.0 && excluded > 1e-3 * total)
        std::fprintf(stderr, "warning: origin-singular contribution significant (%.3g)\n",
                     excluded / total);
    return grid;
}

double approx_convolve_at(const WignerClosure& w0, const KernelParams& kp, double q, double p) {
    kp.validate();
    const double rho2 = q * q + p * p;
    const double eta = kp.eta;
    const double sigma = std::sqrt(rho2) * kp.dx / (2.0 * std::pow(eta, 1.5));
    if (sigma < 1e-6) return w0(q / eta, p / eta) / (eta * eta);

    const auto& g = gauss32();
    const double cq = q / eta, cp = p / eta;
    const double hw = 7.0 * sigma;
    const double pref = 2.0 * eta / (rho2 * M_PI * kp.dx * kp.dx);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    double acc = 0.0;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            const double q0 = cq + hw * g.x[static_cast<size_t>(i)];
            const double p0 = cp + hw * g.x[static_cast<size_t>(j)];
            const double cell = hw * hw * g.w[static_cast<size_t>(i)] * g.w[static_cast<size_t>(j)];
            const double uq = q0 - cq, up = p0 - cp;
            acc += pref * std::exp(-(uq * uq + up * up) * inv2s2) * w0(q0, p0) * cell;
        }
    return acc;
}

WignerGrid approx_convolve(const WignerClosure& w0, const KernelParams& kp, const GridParams& gp) {
    WignerGrid grid = blank_grid(gp);
    for (int i = 0; i < gp.n_q; ++i)
        for (int j = 0; j < gp.n_q; ++j)
            grid.w(i, j) = approx_convolve_at(w0, kp, grid.q[static_cast<size_t>(i)],
                                              grid.p[static_cast<size_t>(j)]);
    return grid;
}

double CoherentObserved::value(double q, double p) const {
    const double q1 = std::sqrt(2.0) * alpha1.real();
    const double p1 = std::sqrt(2.0) * alpha1.imag();
    const double r2 = (q - q1) * (q - q1) + (p - p1) * (p - p1);
    return 2.0 / (1.0 + dw) * std::exp(-r2 / (1.0 + dw));
}

CoherentObserved coherent_bucket_observed(const ModeVector& phi, const ModeVector& gamma,
                                          const KernelParams& kp) {
    kp.validate();
    if (!is_normalized(gamma)) throw std::invalid_argument("oscillator mode not normalized");
    CoherentObserved out;
    out.alpha1 = diamond(gamma, phi);
    const double orth = std::max(0.0, phi.squaredNorm() - std::norm(out.alpha1));
    out.dw = kp.dx * kp.dx * orth / kp.eta;
    return out;
}

CoherentObserved coherent_single_mode_observed(const ModeVector& phi, const ModeVector& gamma,
                                               const KernelParams& kp) {
    kp.validate();
    if (!is_normalized(gamma)) throw std::invalid_argument("oscillator mode not normalized");
    CoherentObserved out;
    out.alpha1 = diamond(gamma, phi);
    out.dw = kp.dx * kp.dx * std::norm(out.alpha1) / kp.eta;
    return out;
}

double laguerre(int n, double x) {
    if (n < 0) throw std::invalid_argument("polynomial order must be nonnegative");
    if (n == 0) return 1.0;
    double lm = 1.0, l = 1.0 - x;
    for (int k = 2; k <= n; ++k) {
        const double next = ((2.0 * k - 1.0 - x) * l - (k - 1.0) * lm) / k;
        lm = l;
        l = next;
    }
    return l;
}

double fock_traced_generating(const MismatchSpec& mm, double j, double alpha0_sq) {
    mm.validate();
    if (std::abs(j) >= 1.0) throw std::invalid_argument("generating parameter must satisfy |J| < 1");
    const double den = 1.0 + j * mm.omega();
    if (std::abs(den) < 1e-12) throw std::runtime_error("generating parameter hits the trace pole");
    const double m2 = std::norm(mm.mu);
    return 2.0 / den * std::exp(-2.0 * alpha0_sq + 4.0 * j * m2 * alpha0_sq / den);
}

double fock_observed_envelope_ratio(int n, const MismatchSpec& mm, double rho_sq) {
    mm.validate();
    if (n < 0) throw std::invalid_argument("photon number must be nonnegative");
    // Written out as a Laguerre polynomial of argument 2 m rho^2/(2m - 1)
    // scaled by (1 - 2m)^n, the form degenerates at m = 1/2.  The product
    // expands to a plain polynomial that does not.
    const double m2 = std::norm(mm.mu);
    const double c = 1.0 - 2.0 * m2;
    const double u = 2.0 * m2 * rho_sq;
    double acc = 0.0;
    double binom = 1.0, u_pow = 1.0, fact = 1.0;
    for (int k = 0; k <= n; ++k) {
        acc += binom * std::pow(c, n - k) * u_pow / fact;
        binom *= static_cast<double>(n - k) / (k + 1.0);
        u_pow *= u;
        fact *= k + 1.0;
    }
    return acc;
}

double fock_observed_wigner(int n, const MismatchSpec& mm, double eta, double q, double p) {
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("efficiency must lie in (0, 1]");
    // Coordinates already rescaled by eta, which removes the efficiency
    // from the shape entirely.
    const double rho_sq = q * q + p * p;
    return 2.0 * std::exp(-rho_sq) * fock_observed_envelope_ratio(n, mm, rho_sq);
}

Complex fock_marginal_generating(const MismatchSpec& mm, Complex j, double q, bool naive) {
    mm.validate();
    const double m2 = std::norm(mm.mu);
    const double w = mm.omega();
    // Both variants share the structure 1/sqrt(pi f g) exp(-q^2 + 2 J m^2 q^2/g);
    // the naive substitution swaps the roles of the two denominators.
    const Complex f = naive ? 1.0 + j : 1.0 - j;
    const Complex g = naive ? 1.0 - j * w : 1.0 + j * w;
    const Complex gexp = naive ? 1.0 + j : 1.0 + j * w;
    return std::exp(Complex(-q * q, 0.0) + 2.0 * j * m2 * q * q / gexp) /
           std::sqrt(M_PI * f * g);
}

double fock_marginal(int n, const MismatchSpec& mm, double q, bool naive) {
    if (n < 0) throw std::invalid_argument("photon number must be nonnegative");
    const int points = 64;
    const double radius = 0.5;
    Complex acc = 0.0;
    for (int k = 0; k < points; ++k) {
        const double phi = 2.0 * M_PI * k / points;
        const Complex j = std::polar(radius, phi);
        acc += fock_marginal_generating(mm, j, q, naive) * std::polar(1.0, -n * phi);
    }
    acc /= static_cast<double>(points) * std::pow(radius, n);
    if (std::abs(acc.imag()) > 1e-9)
        throw std::runtime_error("marginal extraction has a nonreal residue");
    return acc.real();
}

SqueezeSeparation squeezed_separation(const Kernel& a, const Kernel& b, const ModeVector& gamma) {
    if (!is_normalized(gamma)) throw std::invalid_argument("oscillator mode not normalized");
    if (a.rows() != gamma.size() || b.rows() != gamma.size())
        throw std::invalid_argument("kernel and mode dimensions disagree");
    const auto pq = projectors(gamma);
    const Kernel e = a - Kernel::Identity(a.rows(), a.cols());

    SqueezeSeparation sep;
    sep.u = pq.q * (e * gamma);
    sep.v = pq.q * (b * gamma.conjugate());
    sep.a_q = Kernel::Identity(a.rows(), a.cols()) + pq.q * e * pq.q;
    sep.b_qq = pq.q * b * pq.q.conjugate();
    sep.g_a = diamond(gamma, a, gamma);
    sep.g_b = bilinear(gamma.conjugate(), b, gamma.conjugate());
    sep.g_e = sep.g_a - 1.0;
    return sep;
}

SqueezeSeparation squeezed_separation(const SqueezeSpec& spec, const ModeVector& gamma) {
    if (spec.explicit_kernels()) return squeezed_separation(spec.a, spec.b, gamma);
    return squeezed_separation(squeeze_kernel_a(spec.xi, spec.theta),
                               squeeze_kernel_b(spec.xi, spec.theta), gamma);
}

SqueezeDistortion squeezed_trace_coeffs(const SqueezeSeparation& sep) {
    SqueezeDistortion d;
    d.g_a = sep.g_a;
    d.g_b = sep.g_b;
    d.g_e = sep.g_e;
    d.g_u = sep.u.norm();
    d.g_v = sep.v.norm();

    const Eigen::LLT<Kernel> llt(sep.a_q);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("complement kernel is not positive definite");
    const Kernel aq_inv_b = llt.solve(sep.b_qq);
    const Kernel k = sep.a_q.conjugate() - sep.b_qq.conjugate() * aq_inv_b;
    const Eigen::PartialPivLU<Kernel> klu(k);
    if (std::abs(klu.determinant()) < 1e-12)
        throw std::runtime_error("trace kernel is singular");

    const ModeVector aq_inv_u = llt.solve(sep.u);
    const ModeVector aq_inv_v = llt.solve(sep.v);
    const ModeVector psi_u = sep.b_qq.conjugate() * aq_inv_u - sep.v.conjugate();
    const ModeVector psi_v = sep.b_qq.conjugate() * aq_inv_v - sep.u.conjugate();
    const ModeVector k_inv_psi_u = klu.solve(psi_u);
    const ModeVector k_inv_psi_v = klu.solve(psi_v);

    // The quadratic form in the trace exponent carries the coefficient of
    // |alpha0|^2 twice over, hence the half.
    d.h_a = 0.5 * (sep.u.dot(aq_inv_u) + sep.v.dot(aq_inv_v) + psi_u.dot(k_inv_psi_u) +
                   psi_v.dot(k_inv_psi_v));
    d.h_b = sep.u.dot(aq_inv_v) + psi_u.dot(k_inv_psi_v);

    const Complex ld = log_det(sep.a_q) + log_det(k);
    if (std::abs(ld.imag()) > 1e-9)
        throw std::runtime_error("trace normalization has a nonreal residue");
    d.log_norm = -0.5 * ld.real();
    return d;
}

Complex SqueezeDistortion::g_c() const {
    const Complex a = a_eff();
    return (a * a - std::norm(b_eff())) / (2.0 * a);
}

double SqueezeDistortion::g_d(double alpha_sq, double dx) const {
    return 1.0 + 2.0 * alpha_sq * a_eff().real() * dx * dx;
}

SqueezedObserved squeezed_observed(const SqueezeDistortion& coeffs, const KernelParams& kp) {
    kp.validate();
    if (!(coeffs.a_eff().real() > std::abs(coeffs.b_eff())))
        throw std::runtime_error("unphysical distortion coefficients");
    return SqueezedObserved{coeffs, kp};
}

double SqueezedObserved::value(double q, double p) const {
    const Complex alpha(q / std::sqrt(2.0), p / std::sqrt(2.0));
    const double a2 = std::norm(alpha);
    const double gd = coeffs.g_d(a2, kp.dx);
    const Complex gc = coeffs.g_c();
    const double expo = -2.0 * a2 * gc.real() -
                        2.0 * a2 * (coeffs.a_eff() - gc).real() / gd -
                        2.0 * (std::conj(alpha) * std::conj(alpha) * coeffs.b_eff()).real() / gd;
    return 2.0 * std::exp(coeffs.log_norm + expo) / std::sqrt(gd);
}

double single_mode_squeezed_observed(double xi, const MismatchSpec& mm, double q, double p) {
    mm.validate();
    if (xi < 0.0) throw std::invalid_argument("squeezing parameter must be nonnegative");
    const double m2 = std::norm(mm.mu);
    const double n2 = 1.0 - m2;
    const double s2 = std::sinh(0.5 * xi) * std::sinh(0.5 * xi);
    const double big_g = 1.0 + 4.0 * m2 * n2 * s2;
    const Complex alpha(q / std::sqrt(2.0), p / std::sqrt(2.0));
    const double a2 = std::norm(alpha);
    const Complex mu2 = mm.mu * mm.mu;
    const double cross =
        2.0 * (std::conj(alpha) * std::conj(alpha) * mu2).real() * std::sinh(xi);
    return 2.0 / std::sqrt(big_g) *
           std::exp(-(2.0 * a2 + 4.0 * a2 * m2 * s2 + cross) / big_g);
}

double purity(double xi, const MismatchSpec& mm) {
    mm.validate();
    const double m2 = std::norm(mm.mu);
    const double s2 = std::sinh(0.5 * xi) * std::sinh(0.5 * xi);
    return 1.0 / std::sqrt(1.0 + 4.0 * m2 * (1.0 - m2) * s2);
}

double sigma_min(double xi, const MismatchSpec& mm) {
    mm.validate();
    const double m2 = std::norm(mm.mu);
    return std::sqrt(0.5 * (1.0 - m2 + m2 * std::exp(-xi)));
}

double weak_squeezing_gv2(double xi) {
    if (xi < 0.0) throw std::invalid_argument("squeezing parameter must be nonnegative");
    if (xi < 0.3) return 0.0;
    const double c = std::cosh(xi) - 1.0;
    return c * c;
}

MomentStats moment_stats(const WignerGrid& g) {
    const auto m = grid_moments(g);
    if (!std::isfinite(m.mass) || m.mass < 0.5)
        throw std::runtime_error("grid is not normalizable");
    const double dq = g.q[1] - g.q[0], dp = g.p[1] - g.p[0];
    double sq = 0.0;
    for (Eigen::Index i = 0; i < g.w.rows(); ++i)
        for (Eigen::Index j = 0; j < g.w.cols(); ++j) sq += g.w(i, j) * g.w(i, j);
    MomentStats out;
    out.purity = sq * dq * dp / (2.0 * M_PI) / (m.mass * m.mass);
    out.mean_q = m.mean_q;
    out.mean_p = m.mean_p;
    const double mid = 0.5 * (m.var_q + m.var_p);
    const double off = std::hypot(0.5 * (m.var_q - m.var_p), m.cov_qp);
    out.sigma_min = std::sqrt(std::max(0.0, mid - off));
    out.sigma_max = std::sqrt(mid + off);
    return out;
}

}  // namespace homtom
