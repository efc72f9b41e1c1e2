#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "homtom/core.hpp"
#include "homtom/distortion.hpp"
#include "homtom/states.hpp"

using namespace homtom;

namespace {

WignerGrid grid_from(const WignerClosure& f, double box, int n) {
    WignerGrid g;
    g.q.resize(static_cast<size_t>(n));
    const double d = 2.0 * box / (n - 1);
    for (int i = 0; i < n; ++i) g.q[static_cast<size_t>(i)] = -box + i * d;
    g.p = g.q;
    g.w.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.w(i, j) = f(g.q[static_cast<size_t>(i)], g.p[static_cast<size_t>(j)]);
    return g;
}

double vacuum_density(double q, double p) { return 2.0 * std::exp(-q * q - p * p); }

}  // namespace

TEST_CASE("kernel normalization and scale invariance") {
    KernelParams kp;
    kp.dx = 0.1;
    kp.eta = 0.7;

    // Trapezoid over the output plane around the image point.
    auto mass = [&](double q0, double p0) {
        const double cq = q0 * kp.eta, cp = p0 * kp.eta;
        const double s = std::hypot(q0, p0) * kp.dx * std::sqrt(kp.eta) / 2.0;
        const double lim = 8.0 * s, h = s / 40.0;
        double acc = 0.0;
        for (double q = cq - lim; q <= cq + lim; q += h)
            for (double p = cp - lim; p <= cp + lim; p += h)
                acc += kappa(q0, p0, q, p, kp) * h * h;
        return acc;
    };
    CHECK(mass(1.3, -0.4) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(mass(0.2, 0.1) == doctest::Approx(1.0).epsilon(1e-8));

    const double base = kappa(1.1, 0.6, 1.0, 0.8, kp);
    for (double s : {0.5, 2.0, 10.0})
        CHECK(kappa(s * 1.1, s * 0.6, s * 1.0, s * 0.8, kp) * s * s ==
              doctest::Approx(base).epsilon(1e-12));

    CHECK_THROWS_AS(kappa(0.0, 0.0, 1.0, 1.0, kp), std::invalid_argument);
    KernelParams bad = kp;
    bad.eta = 1.5;
    CHECK_THROWS_AS(kappa(1.0, 0.0, 1.0, 0.0, bad), std::invalid_argument);
}

TEST_CASE("kernel peaks at the scaled input point") {
    KernelParams kp;
    kp.dx = 0.01;
    kp.eta = 1.0;
    const double q = 2.0, p = 1.0;
    double best = -1.0, bq = 0, bp = 0;
    for (double q0 = 1.9; q0 <= 2.1; q0 += 0.002)
        for (double p0 = 0.9; p0 <= 1.1; p0 += 0.002) {
            const double v = kappa(q0, p0, q, p, kp);
            if (v > best) { best = v; bq = q0; bp = p0; }
        }
    CHECK(std::abs(bq - q) < 0.005);
    CHECK(std::abs(bp - p) < 0.005);
}

TEST_CASE("superposition reduces to a rescale at vanishing resolution") {
    KernelParams kp;
    kp.dx = 1e-6;
    kp.eta = 0.8;
    auto w0 = [](double q, double p) { return 2.0 * std::exp(-(q - 3.0) * (q - 3.0) - p * p); };
    for (double q : {1.6, 2.4, 2.8}) {
        const double got = superpose_at(w0, kp, q, 0.3);
        const double want = w0(q / kp.eta, 0.3 / kp.eta) / (kp.eta * kp.eta);
        CHECK(got == doctest::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("superposition matches the closed coherent form") {
    KernelParams kp;
    kp.dx = 0.05;
    kp.eta = 1.0;
    const double q1 = 3.0 * std::sqrt(2.0);
    auto w0 = [&](double q, double p) {
        return 2.0 * std::exp(-(q - q1) * (q - q1) - p * p);
    };
    CoherentObserved ref;
    ref.alpha1 = 3.0;
    ref.dw = 9.0 * kp.dx * kp.dx / kp.eta;

    // Plain Riemann sum anchors the windowed quadrature independently.
    auto brute = [&](double q, double p) {
        const double h = 0.004;
        double acc = 0.0;
        for (double q0 = q1 - 4.0; q0 <= q1 + 4.0; q0 += h)
            for (double p0 = -4.0; p0 <= 4.0; p0 += h)
                acc += kappa(q0, p0, q, p, kp) * w0(q0, p0) * h * h;
        return acc;
    };
    for (double q : {q1 - 1.0, q1, q1 + 0.6})
        CHECK(superpose_at(w0, kp, q, 0.2) == doctest::Approx(brute(q, 0.2)).epsilon(1e-6));

    // The pinned-width closed form is tightest at the distribution center;
    // away from it the width gradient of the kernel shows up at order
    // dx^2 times the offset.
    CHECK(superpose_at(w0, kp, q1, 0.0) == doctest::Approx(ref.value(q1, 0.0)).epsilon(2e-3));
    for (double q : {q1 - 1.0, q1 - 0.3, q1 + 0.6})
        for (double p : {-0.8, 0.0, 0.5})
            CHECK(std::abs(superpose_at(w0, kp, q, p) - ref.value(q, p)) < 1.5e-2);
}

TEST_CASE("ring width grows with radius") {
    KernelParams kp;
    kp.dx = 0.05;
    kp.eta = 1.0;
    auto width_at = [&](double r0) {
        auto ring = [r0](double q, double p) {
            const double rho = std::hypot(q, p);
            return std::exp(-40.0 * (rho - r0) * (rho - r0));
        };
        // Second moment of the radial profile along the q axis.
        double m0 = 0, m2 = 0;
        for (double q = r0 - 1.0; q <= r0 + 1.0; q += 0.02) {
            const double v = superpose_at(ring, kp, q, 0.0);
            m0 += v;
            m2 += v * (q - r0) * (q - r0);
        }
        return std::sqrt(m2 / m0);
    };
    const double w4 = width_at(4.0), w8 = width_at(8.0);
    CHECK(w8 > 1.3 * w4);
}

TEST_CASE("blur approximation agrees with the superposition") {
    KernelParams kp;
    kp.dx = 0.02;
    kp.eta = 1.0;
    const double q1 = 3.0 * std::sqrt(2.0);
    auto w0 = [&](double q, double p) {
        return 2.0 * std::exp(-(q - q1) * (q - q1) - p * p);
    };
    // Sup-norm agreement measured against the scale of the state itself.
    const double peak = superpose_at(w0, kp, q1, 0.0);
    for (double q : {q1 - 0.8, q1, q1 + 0.8})
        for (double p : {-0.6, 0.0, 0.6})
            CHECK(std::abs(superpose_at(w0, kp, q, p) - approx_convolve_at(w0, kp, q, p)) <
                  1e-3 * peak);
}

TEST_CASE("blur of the traced number-state family has a closed form") {
    // Blurring the generating-function Gaussian with the pinned-width
    // kernel can be integrated exactly; the quadrature must hit it.
    const double j = 0.3, eta = 0.9, dx = 0.05;
    MismatchSpec mm;
    mm.mu = std::sqrt(0.6);
    const double w = mm.omega();
    KernelParams kp;
    kp.dx = dx;
    kp.eta = eta;
    auto w0 = [&](double q0, double p0) {
        return fock_traced_generating(mm, j, 0.5 * (q0 * q0 + p0 * p0));
    };
    for (double q : {0.5, 1.0, 2.0, 3.0})
        for (double p : {0.0, 1.2}) {
            const double a2 = 0.5 * (q * q + p * p);
            const double den = (1.0 - j) * a2 * dx * dx + (1.0 + j * w) * eta * eta * eta;
            const double want = 2.0 * eta / den * std::exp(-2.0 * (1.0 - j) * a2 * eta / den);
            CHECK(approx_convolve_at(w0, kp, q, p) == doctest::Approx(want).epsilon(1e-9));
        }
}

TEST_CASE("observed coherent widths") {
    KernelParams kp;
    kp.dx = 0.5;
    kp.eta = 1.0;
    ModeVector gamma = ModeVector::Zero(2);
    gamma(0) = 1.0;

    ModeVector matched = 3.0 * gamma;
    CHECK(coherent_bucket_observed(matched, gamma, kp).dw == 0.0);
    CHECK(coherent_bucket_observed(matched, gamma, kp).alpha1 == Complex(3.0, 0.0));
    CHECK(coherent_single_mode_observed(matched, gamma, kp).alpha1 == Complex(3.0, 0.0));

    ModeVector phi = ModeVector::Zero(2);
    phi(0) = 1.5;
    phi(1) = 2.0;  // orthogonal weight 4
    CHECK(coherent_bucket_observed(phi, gamma, kp).dw == doctest::Approx(1.0).epsilon(1e-14));

    KernelParams kp2;
    kp2.dx = 1.0 / 30.0;
    kp2.eta = 1.0;
    ModeVector phi3 = 3.0 * gamma;
    CHECK(coherent_single_mode_observed(phi3, gamma, kp2).dw ==
          doctest::Approx(0.01).epsilon(1e-12));

    // Width doubling at dw = 1: variance of the value() profile.
    CoherentObserved c;
    c.alpha1 = 0.0;
    c.dw = 1.0;
    CHECK(c.value(0.0, 0.0) == doctest::Approx(1.0));
    CHECK(c.value(std::sqrt(2.0), 0.0) == doctest::Approx(std::exp(-1.0)));

    // Vanishing resolution restores the bare state for any mismatch.
    KernelParams kp3;
    kp3.dx = 1e-9;
    kp3.eta = 0.6;
    CHECK(coherent_bucket_observed(phi, gamma, kp3).dw < 1e-17);
    CHECK(coherent_single_mode_observed(phi, gamma, kp3).dw < 1e-17);
}

TEST_CASE("laguerre recurrence") {
    CHECK(laguerre(1, 0.0) == 1.0);
    CHECK(laguerre(2, 2.0) == doctest::Approx(-1.0).epsilon(1e-14));
    // Series oracle sum_k C(n,k) (-x)^k / k!
    for (int n = 0; n <= 10; ++n)
        for (double x : {0.0, 0.3, 1.7, 5.0, 12.0, 20.0}) {
            double acc = 0.0, binom = 1.0, xp = 1.0, fact = 1.0;
            for (int k = 0; k <= n; ++k) {
                acc += binom * xp / fact;
                binom *= static_cast<double>(n - k) / (k + 1.0);
                xp *= -x;
                fact *= k + 1.0;
            }
            CHECK(laguerre(n, x) == doctest::Approx(acc).epsilon(1e-10));
        }
    CHECK_THROWS_AS(laguerre(-1, 0.0), std::invalid_argument);
}

TEST_CASE("traced number-state generating function") {
    MismatchSpec matched;
    matched.mu = 1.0;
    for (double j : {-0.5, 0.0, 0.4, 0.9})
        for (double a : {0.0, 0.7, 2.0}) {
            const double want = 2.0 / (1.0 + j) * std::exp(-2.0 * a * (1.0 - j) / (1.0 + j));
            CHECK(fock_traced_generating(matched, j, a) == doctest::Approx(want).epsilon(1e-13));
        }
    // Orthogonal mode: every number state traces to vacuum, so the
    // generating function is vacuum divided by 1 - J.
    MismatchSpec off;
    off.mu = 0.0;
    for (double j : {-0.5, 0.4})
        CHECK(fock_traced_generating(off, j, 0.8) ==
              doctest::Approx(2.0 * std::exp(-1.6) / (1.0 - j)).epsilon(1e-13));
    CHECK_THROWS_AS(fock_traced_generating(matched, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("observed number-state Wigner functions") {
    MismatchSpec half;
    half.mu = std::sqrt(0.5);
    // Balanced overlap kills the single-photon value at the origin.
    CHECK(fock_observed_envelope_ratio(1, half, 0.0) == doctest::Approx(0.0));

    // Against the Laguerre form away from the degenerate overlap.
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> rho(0.0, 6.0);
    for (double m2 : {0.0, 0.2, 0.4, 0.7, 1.0}) {
        MismatchSpec mm;
        mm.mu = std::sqrt(m2);
        const double c = 2.0 * m2 - 1.0;
        for (int n = 0; n <= 5; ++n)
            for (int rep = 0; rep < 6; ++rep) {
                const double r2 = rho(rng);
                const double want = (std::abs(c) < 0.1)
                                        ? fock_observed_envelope_ratio(n, mm, r2)
                                        : std::pow(-c, n) * laguerre(n, 2.0 * m2 * r2 / c);
                CHECK(fock_observed_envelope_ratio(n, mm, r2) ==
                      doctest::Approx(want).epsilon(1e-11));
            }
    }

    MismatchSpec full;
    full.mu = 1.0;
    MismatchSpec none;
    none.mu = 0.0;
    CHECK(fock_observed_wigner(1, full, 1.0, 0.0, 0.0) == doctest::Approx(-2.0));
    CHECK(fock_observed_wigner(1, none, 1.0, 0.0, 0.0) == doctest::Approx(2.0));
    CHECK(fock_observed_wigner(0, half, 1.0, 1.0, -0.5) ==
          doctest::Approx(vacuum_density(1.0, -0.5)).epsilon(1e-13));

    // Origin value interpolates as (1 - 2 m^2)^n.
    for (int n : {1, 2, 3})
        for (double m2 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            MismatchSpec mm;
            mm.mu = std::sqrt(m2);
            CHECK(fock_observed_wigner(n, mm, 1.0, 0.0, 0.0) ==
                  doctest::Approx(2.0 * std::pow(1.0 - 2.0 * m2, n)).epsilon(1e-12));
        }

    // Mass check: the traced states stay normalized.
    for (int n : {1, 2, 3})
        for (double m2 : {0.3, 0.5, 0.9}) {
            MismatchSpec mm;
            mm.mu = std::sqrt(m2);
            double acc = 0.0;
            const double h = 0.02;
            for (double q = -6.0; q <= 6.0; q += h)
                for (double p = -6.0; p <= 6.0; p += h)
                    acc += fock_observed_wigner(n, mm, 1.0, q, p) * h * h;
            CHECK(acc / (2.0 * M_PI) == doctest::Approx(1.0).epsilon(1e-8));
        }
}

TEST_CASE("observed and naive marginals") {
    for (double m2 : {0.0, 0.3, 0.7, 1.0}) {
        MismatchSpec mm;
        mm.mu = std::sqrt(m2);
        for (double q : {0.0, 0.8, 1.9}) {
            const double env = std::exp(-q * q) / std::sqrt(M_PI);
            CHECK(fock_marginal(1, mm, q, false) ==
                  doctest::Approx(env * (2.0 * m2 * q * q + 1.0 - m2)).epsilon(1e-12));
            CHECK(fock_marginal(1, mm, q, true) ==
                  doctest::Approx(env * (2.0 * m2 * q * q - 1.0 + m2)).epsilon(1e-12));
            CHECK(fock_marginal(0, mm, q, false) == doctest::Approx(env).epsilon(1e-12));
            CHECK(fock_marginal(0, mm, q, true) == doctest::Approx(env).epsilon(1e-12));
        }
        if (m2 < 1.0) CHECK(fock_marginal(1, mm, 0.0, true) < 0.0);
    }

    MismatchSpec full;
    full.mu = 1.0;
    CHECK(fock_marginal(1, full, 0.0, false) == doctest::Approx(0.0));
    CHECK(fock_marginal(1, full, 0.0, true) == doctest::Approx(0.0));

    // Correct marginals keep probability nonnegative.
    for (int n : {1, 2, 3})
        for (int k = 0; k <= 10; ++k) {
            MismatchSpec mm;
            mm.mu = std::sqrt(k / 10.0);
            for (double q = -6.0; q <= 6.0; q += 0.25)
                CHECK(fock_marginal(n, mm, q, false) >= -1e-9);
        }

    // Consistency with the two-dimensional form integrated over p.
    MismatchSpec mm;
    mm.mu = std::sqrt(0.3);
    for (double q : {0.0, 1.1}) {
        double acc = 0.0;
        const double h = 0.01;
        for (double p = -7.0; p <= 7.0; p += h)
            acc += fock_observed_wigner(2, mm, 1.0, q, p) * h;
        CHECK(fock_marginal(2, mm, q, false) == doctest::Approx(acc / (2.0 * M_PI)).epsilon(1e-9));
    }
}

TEST_CASE("kernel separation along the oscillator mode") {
    const double xi = 1.4;
    ModeVector gamma = ModeVector::Zero(3);
    gamma(0) = 1.0;
    ModeVector lambda = ModeVector::Zero(3);
    lambda(1) = 1.0;
    const Complex mu = Complex(0.5, 0.3);
    const double nu = std::sqrt(1.0 - std::norm(mu));
    ModeVector theta = mu * gamma + nu * lambda;

    const auto sep = squeezed_separation(squeeze_kernel_a(xi, theta),
                                         squeeze_kernel_b(xi, theta), gamma);
    const double s2 = std::sinh(0.5 * xi) * std::sinh(0.5 * xi);
    CHECK((sep.u - 2.0 * s2 * nu * std::conj(mu) * lambda).norm() < 1e-14);
    CHECK((sep.v - std::sinh(xi) * nu * mu * lambda).norm() < 1e-14);
    CHECK(std::abs(diamond(gamma, sep.u)) < 1e-15);
    CHECK(std::abs(diamond(gamma, sep.v)) < 1e-15);
    CHECK(std::abs(sep.g_a - (1.0 + 2.0 * s2 * std::norm(mu))) < 1e-14);
    CHECK(std::abs(sep.g_b - std::sinh(xi) * mu * mu) < 1e-14);
    CHECK(std::abs(sep.g_e - (sep.g_a - 1.0)) < 1e-14);

    SqueezeSpec spec;
    spec.xi = xi;
    spec.theta = theta;
    const auto sep2 = squeezed_separation(spec, gamma);
    CHECK((sep2.a_q - sep.a_q).norm() < 1e-14);

    // Matched mode leaves nothing in the complement.
    const auto clean = squeezed_separation(squeeze_kernel_a(xi, gamma),
                                           squeeze_kernel_b(xi, gamma), gamma);
    CHECK(clean.u.norm() < 1e-14);
    CHECK(clean.v.norm() < 1e-14);
    CHECK(clean.b_qq.norm() < 1e-14);
}

TEST_CASE("trace coefficients against the integral oracle") {
    // The closed form must reproduce the exponent of the actual Gaussian
    // trace with the cross couplings as sources.
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> real_draw(0.2, 2.2);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    for (int rep = 0; rep < 8; ++rep) {
        const double xi = real_draw(rng);
        const Complex mu = std::polar(std::sqrt(std::uniform_real_distribution<double>(
                                          0.05, 0.95)(rng)),
                                      ang(rng));
        ModeVector gamma = ModeVector::Zero(2);
        gamma(0) = 1.0;
        ModeVector lambda = ModeVector::Zero(2);
        lambda(1) = 1.0;
        const double nu = std::sqrt(1.0 - std::norm(mu));
        ModeVector theta = mu * gamma + nu * lambda;
        const auto sep = squeezed_separation(squeeze_kernel_a(xi, theta),
                                             squeeze_kernel_b(xi, theta), gamma);
        const auto d = squeezed_trace_coeffs(sep);

        auto probe = [&](Complex a0) {
            const ModeVector psi = sep.u * a0 + sep.v * std::conj(a0);
            const ModeVector src = Complex(0.0, -2.0) * psi;
            return gaussian_integral(sep.a_q, sep.b_qq, src, src);
        };
        const Complex e1 = probe(1.0).exponent;
        const Complex ei = probe(Complex(0.0, 1.0)).exponent;
        const Complex ed = probe(Complex(1.0, 1.0) / std::sqrt(2.0)).exponent;
        const Complex ha = (e1 + ei) / 4.0;
        const Complex hb = (e1 - ei) / 4.0 + Complex(0.0, 1.0) * (ed - 2.0 * ha) / 2.0;
        CHECK(std::abs(d.h_a - ha) < 1e-10);
        CHECK(std::abs(d.h_b - hb) < 1e-10);

        // Quadratic structure holds at a fourth probe point.
        const Complex e2 = probe(2.0).exponent;
        CHECK(std::abs(e2 - 4.0 * e1) < 1e-9);

        CHECK(probe(1.0).logAmplitude.real() == doctest::Approx(d.log_norm).epsilon(1e-10));

        // Closed single-mode relations for the shifted overlaps.
        const double s2 = std::sinh(0.5 * xi) * std::sinh(0.5 * xi);
        const double big_g = 1.0 + 4.0 * std::norm(mu) * nu * nu * s2;
        CHECK(std::abs(d.a_eff() - (1.0 + 2.0 * std::norm(mu) * s2) / big_g) < 1e-12);
        CHECK(std::abs(d.b_eff() - mu * mu * std::sinh(xi) / big_g) < 1e-12);
        CHECK(d.log_norm == doctest::Approx(-0.5 * std::log(big_g)).epsilon(1e-12));
    }

    // Matched mode: no distortion, unit normalization.
    ModeVector gamma = ModeVector::Ones(1);
    const auto sep = squeezed_separation(squeeze_kernel_a(1.0, gamma),
                                         squeeze_kernel_b(1.0, gamma), gamma);
    const auto d = squeezed_trace_coeffs(sep);
    CHECK(std::abs(d.h_a) < 1e-14);
    CHECK(std::abs(d.h_b) < 1e-14);
    CHECK(std::abs(d.log_norm) < 1e-14);
}

TEST_CASE("weak squeezing leaves only a quartic remainder") {
    const double xi = 0.1;
    const double ge = std::cosh(xi) - 1.0;
    const double gb = std::sinh(xi);
    CHECK(std::abs(2.0 * ge - gb * gb) < 1e-4);
    CHECK(weak_squeezing_gv2(xi) == 0.0);
    CHECK(weak_squeezing_gv2(0.5) ==
          doctest::Approx(std::pow(std::cosh(0.5) - 1.0, 2)).epsilon(1e-14));
}

TEST_CASE("observed squeezed state matches the explicit closed form") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> pts(-3.0, 3.0);
    KernelParams kp0;
    kp0.dx = 1e-12;  // removes the finite-resolution factor below any tolerance
    kp0.eta = 1.0;
    for (double xi : {0.4, 1.0, 2.0})
        for (double m2 : {0.0, 0.3, 0.5, 0.8, 1.0}) {
            MismatchSpec mm;
            mm.mu = std::sqrt(m2);
            ModeVector gamma = ModeVector::Zero(2);
            gamma(0) = 1.0;
            ModeVector theta = ModeVector::Zero(2);
            theta(0) = mm.mu;
            theta(1) = mm.nu();
            const auto d = squeezed_trace_coeffs(squeezed_separation(
                squeeze_kernel_a(xi, theta), squeeze_kernel_b(xi, theta), gamma));
            const auto obs = squeezed_observed(d, kp0);
            for (int rep = 0; rep < 5; ++rep) {
                const double q = pts(rng), p = pts(rng);
                CHECK(obs.value(q, p) ==
                      doctest::Approx(single_mode_squeezed_observed(xi, mm, q, p))
                          .epsilon(1e-10));
            }
        }

    // Finite resolution broadens but stays normalized to first order.
    MismatchSpec half;
    half.mu = std::sqrt(0.5);
    ModeVector gamma = ModeVector::Zero(2);
    gamma(0) = 1.0;
    ModeVector theta = ModeVector::Zero(2);
    theta(0) = half.mu;
    theta(1) = half.nu();
    const auto d = squeezed_trace_coeffs(squeezed_separation(
        squeeze_kernel_a(1.0, theta), squeeze_kernel_b(1.0, theta), gamma));
    KernelParams kp;
    kp.dx = 0.05;
    kp.eta = 1.0;
    const auto obs = squeezed_observed(d, kp);
    CHECK(obs.value(2.0, 1.0) < squeezed_observed(d, kp0).value(2.0, 1.0) * 1.05);
    CHECK(obs.value(0.0, 0.0) ==
          doctest::Approx(squeezed_observed(d, kp0).value(0.0, 0.0)).epsilon(1e-12));
}

TEST_CASE("purity and minimum spread of the observed squeezed state") {
    MismatchSpec half;
    half.mu = std::sqrt(0.5);
    CHECK(purity(0.0, half) == 1.0);
    CHECK(purity(2.0, half) == doctest::Approx(1.0 / std::cosh(1.0)).epsilon(1e-14));
    MismatchSpec full;
    full.mu = 1.0;
    MismatchSpec none;
    none.mu = 0.0;
    for (double xi : {0.0, 0.7, 2.5}) {
        CHECK(purity(xi, full) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(purity(xi, none) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(sigma_min(xi, full) ==
              doctest::Approx(std::exp(-0.5 * xi) / std::sqrt(2.0)).epsilon(1e-14));
        CHECK(sigma_min(xi, none) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    }
    // sqrt((1 + e^-2)/2)/sqrt(2), evaluated to full precision.
    CHECK(sigma_min(2.0, half) == doctest::Approx(0.53276049).epsilon(1e-6));

    // Bounds and monotonicity over the parameter sheet.
    double prev_xi = 2.0;
    for (double xi : {0.2, 0.6, 1.1, 1.9, 3.0}) {
        double prev_m = 2.0;
        for (double m2 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            MismatchSpec mm;
            mm.mu = std::sqrt(m2);
            const double s = sigma_min(xi, mm) * std::sqrt(2.0);
            CHECK(s <= 1.0 + 1e-15);
            CHECK(s >= std::exp(-0.5 * xi) - 1e-15);
            CHECK(s < prev_m + 1e-15);
            prev_m = s;
            const double pu = purity(xi, mm);
            CHECK(pu > 0.0);
            CHECK(pu <= 1.0);
        }
        const double s_half = sigma_min(xi, half);
        CHECK(s_half < prev_xi + 1e-15);
        prev_xi = s_half;
    }
}

TEST_CASE("moment statistics of Wigner grids") {
    const auto vac = grid_from(vacuum_density, 6.0, 201);
    const auto mv = moment_stats(vac);
    CHECK(mv.purity == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mv.sigma_min == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    CHECK(mv.sigma_max == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));

    MismatchSpec half;
    half.mu = std::sqrt(0.5);
    const auto sq = grid_from(
        [&](double q, double p) { return single_mode_squeezed_observed(2.0, half, q, p); }, 9.0,
        301);
    const auto ms = moment_stats(sq);
    CHECK(ms.purity == doctest::Approx(purity(2.0, half)).epsilon(1e-3));
    CHECK(ms.sigma_min == doctest::Approx(sigma_min(2.0, half)).epsilon(1e-3));

    CoherentObserved c;
    c.alpha1 = 1.0;
    c.dw = 1.0;
    const auto cg = grid_from([&](double q, double p) { return c.value(q, p); }, 9.0, 301);
    const auto mc = moment_stats(cg);
    CHECK(mc.purity == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(mc.sigma_min == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mc.mean_q == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));

    WignerGrid junk = grid_from([](double, double) { return 0.0; }, 6.0, 51);
    CHECK_THROWS_AS(moment_stats(junk), std::runtime_error);
}

TEST_CASE("validation of the distortion inputs") {
    KernelParams kp;
    kp.dx = 0.0;
    CHECK_THROWS_AS(kp.validate(), std::invalid_argument);
    kp.dx = 0.1;
    kp.eta = 0.0;
    CHECK_THROWS_AS(kp.validate(), std::invalid_argument);

    MismatchSpec mm;
    mm.mu = 1.2;
    CHECK_THROWS_AS(mm.validate(), std::invalid_argument);
    mm.mu = std::polar(0.6, 1.0);
    CHECK_NOTHROW(mm.validate());
    CHECK(mm.nu() == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(mm.omega() == doctest::Approx(-0.28).epsilon(1e-14));

    CHECK_THROWS_AS(fock_observed_envelope_ratio(-1, mm, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(single_mode_squeezed_observed(-0.1, mm, 0.0, 0.0), std::invalid_argument);

    // Unphysical coefficient sets are rejected up front.
    SqueezeDistortion bad;
    bad.g_a = 1.0;
    bad.g_b = 2.0;
    KernelParams ok;
    ok.dx = 0.01;
    CHECK_THROWS_AS(squeezed_observed(bad, ok), std::runtime_error);
}
