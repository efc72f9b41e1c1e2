#include "homtom/tomography.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace homtom {

void CharacteristicSlice::validate() const {
    if (r.size() != chi.size() || r.size() < 3 || r.size() % 2 == 0)
        throw std::invalid_argument("characteristic slice needs an odd centered grid");
    const size_t c = r.size() / 2;
    if (std::abs(r[c]) > 1e-12) throw std::invalid_argument("characteristic grid not centered");
    if (std::abs(chi[c] - 1.0) > 1e-9)
        throw std::invalid_argument("characteristic slice not normalized at r = 0");
}

double WignerGrid::value_at(double q0, double p0) const {
    const double dq = q[1] - q[0], dp = p[1] - p[0];
    const auto i = static_cast<Eigen::Index>(std::lround((q0 - q.front()) / dq));
    const auto j = static_cast<Eigen::Index>(std::lround((p0 - p.front()) / dp));
    if (i < 0 || j < 0 || i >= w.rows() || j >= w.cols())
        throw std::out_of_range("point outside the Wigner grid");
    return w(i, j);
}

GridMoments grid_moments(const WignerGrid& g) {
    const double dq = g.q[1] - g.q[0], dp = g.p[1] - g.p[0];
    const double cell = dq * dp / (2.0 * M_PI);
    GridMoments m;
    for (Eigen::Index i = 0; i < g.w.rows(); ++i)
        for (Eigen::Index j = 0; j < g.w.cols(); ++j) {
            const double v = g.w(i, j) * cell;
            m.mass += v;
            m.mean_q += g.q[static_cast<size_t>(i)] * v;
            m.mean_p += g.p[static_cast<size_t>(j)] * v;
        }
    m.mean_q /= m.mass;
    m.mean_p /= m.mass;
    for (Eigen::Index i = 0; i < g.w.rows(); ++i)
        for (Eigen::Index j = 0; j < g.w.cols(); ++j) {
            const double v = g.w(i, j) * cell / m.mass;
            const double uq = g.q[static_cast<size_t>(i)] - m.mean_q;
            const double up = g.p[static_cast<size_t>(j)] - m.mean_p;
            m.var_q += uq * uq * v;
            m.var_p += up * up * v;
            m.cov_qp += uq * up * v;
        }
    return m;
}

CharacteristicSlice characteristic_from_marginal(const QuadratureDistribution& rx, double r_max,
                                                 double dr) {
    if (rx.x.size() < 2 || rx.x.size() != rx.r.size())
        throw std::invalid_argument("marginal grid malformed");
    if (!(dr > 0.0) || !(r_max > dr)) throw std::invalid_argument("bad r-grid request");
    const auto half = static_cast<long>(std::lround(r_max / dr));
    const double dx = rx.x[1] - rx.x[0];

    CharacteristicSlice s;
    s.theta = rx.theta;
    s.r.resize(2 * static_cast<size_t>(half) + 1);
    s.chi.assign(s.r.size(), Complex(0.0, 0.0));
    for (long j = -half; j <= half; ++j) s.r[static_cast<size_t>(j + half)] = j * dr;

    // chi(r) = sum_x R(x) e^{ixr} dx, accumulated per x by phase recurrence
    // along the r-axis with periodic exact refresh.
    for (size_t n = 0; n < rx.x.size(); ++n) {
        const double wgt = rx.r[n] * dx;
        if (wgt == 0.0) continue;
        const double x = rx.x[n];
        const Complex step = std::exp(Complex(0.0, x * dr));
        Complex ph = std::exp(Complex(0.0, x * s.r.front()));
        for (size_t j = 0; j < s.r.size(); ++j) {
            if (j % 512 == 0) ph = std::exp(Complex(0.0, x * s.r[j]));
            s.chi[j] += wgt * ph;
            ph *= step;
        }
    }
    const Complex at0 = s.chi[static_cast<size_t>(half)];
    if (std::abs(at0) < 1e-12) throw std::runtime_error("characteristic slice lost its mass");
    for (auto& v : s.chi) v /= at0.real();

    const double edge = std::max(std::abs(s.chi.front()), std::abs(s.chi.back()));
    if (edge > 1e-3) {
        std::fprintf(stderr, "warning: characteristic function clipped at r_max (|chi| = %.3g)\n",
                     edge);
        s.clip_warning = true;
    }
    return s;
}

CharacteristicSlice clip_boundary(const CharacteristicSlice& slice, double gamma0) {
    if (!(gamma0 > 0.0)) throw std::invalid_argument("clip_boundary needs a positive gamma0");
    const double bound = M_PI * gamma0;
    CharacteristicSlice out = slice;
    double kept = 0.0, lost = 0.0;
    for (size_t j = 0; j < out.r.size(); ++j) {
        const double energy = std::norm(out.chi[j]);
        if (std::abs(out.r[j]) >= bound) {
            lost += energy;
            out.chi[j] = 0.0;
        } else {
            kept += energy;
        }
    }
    out.clipped_fraction = (kept + lost) > 0.0 ? lost / (kept + lost) : 0.0;
    return out;
}

namespace {

// Hann window over the reachable band, applied only when clipping actually
// removed something.
void apodize(std::vector<Complex>& chi, const std::vector<double>& r, double bound) {
    for (size_t j = 0; j < chi.size(); ++j) {
        const double t = std::abs(r[j]) / bound;
        chi[j] *= t < 1.0 ? 0.5 * (1.0 + std::cos(M_PI * t)) : 0.0;
    }
}

struct FilteredSlice {
    std::vector<Complex> g;  // periodic in x' with period 2pi/dr
    double dxp = 0.0;

    Complex sample(double xp) const {
        const auto n = static_cast<double>(g.size());
        double t = xp / dxp;
        t -= std::floor(t / n) * n;
        const auto i1 = static_cast<long>(std::floor(t));
        const double f = t - i1;
        auto wrap = [&](long i) {
            return g[static_cast<size_t>(((i % (long)g.size()) + (long)g.size()) % (long)g.size())];
        };
        const Complex p0 = wrap(i1 - 1), p1 = wrap(i1), p2 = wrap(i1 + 1), p3 = wrap(i1 + 2);
        // Catmull-Rom in the periodic buffer.
        return 0.5 * (2.0 * p1 + f * ((p2 - p0) +
                      f * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                      f * (3.0 * (p1 - p2) + p3 - p0))));
    }
};

// Ramp-filtered transform g(x') = int chi(r) |r| e^{irx'} dr of one slice,
// as a periodic fine grid via FFT.
FilteredSlice filter_slice(const std::vector<double>& r, const std::vector<Complex>& chi,
                           size_t stride) {
    if ((r.size() / 2) % stride != 0)
        throw std::invalid_argument("r-grid does not coarsen by the requested stride");
    const double dr = (r[1] - r[0]) * static_cast<double>(stride);
    size_t n_fft = 32768;
    while (2.0 * M_PI / (n_fft * dr) > 0.004) n_fft *= 2;

    std::vector<Complex> buf(n_fft, Complex(0.0, 0.0));
    const long half = static_cast<long>(r.size() / 2);
    for (long j = -half; j <= half; j += static_cast<long>(stride)) {
        const long slot = j / static_cast<long>(stride);
        const size_t idx =
            static_cast<size_t>((slot + static_cast<long>(n_fft)) % static_cast<long>(n_fft));
        const size_t src = static_cast<size_t>(j + half);
        buf[idx] = chi[src] * std::abs(r[src]) * dr;
    }
    // chi carries e^{+ixr} relative to the marginal, so the inversion runs
    // with the conjugate kernel.
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n_fft),
                                      reinterpret_cast<fftw_complex*>(buf.data()),
                                      reinterpret_cast<fftw_complex*>(buf.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    FilteredSlice out;
    out.g = std::move(buf);
    out.dxp = 2.0 * M_PI / (static_cast<double>(n_fft) * dr);
    return out;
}

void check_fan(const std::vector<CharacteristicSlice>& slices, const GridParams& gp) {
    if (slices.size() < 4) throw std::invalid_argument("too few slices");
    const double dth = slices[1].theta - slices[0].theta;
    for (size_t k = 0; k < slices.size(); ++k) {
        if (slices[k].r.size() != slices[0].r.size())
            throw std::invalid_argument("slices disagree on the r-grid");
        if (std::abs(slices[k].theta - (slices[0].theta + dth * k)) > 1e-9)
            throw std::invalid_argument("slice fan is not uniform in theta");
    }
    const double span = dth * static_cast<double>(slices.size());
    const double target = gp.full_circle ? 2.0 * M_PI : M_PI;
    if (std::abs(span - target) > 1e-6)
        throw std::invalid_argument("slice fan does not cover the requested span");
}

}  // namespace

WignerGrid symplectic_fourier(const std::vector<CharacteristicSlice>& slices,
                              const GridParams& gp) {
    check_fan(slices, gp);
    const double dth = slices[1].theta - slices[0].theta;
    const double coverage = gp.full_circle ? 2.0 : 1.0;

    WignerGrid grid;
    grid.q.resize(static_cast<size_t>(gp.n_q));
    grid.p.resize(static_cast<size_t>(gp.n_q));
    const double dq = 2.0 * gp.q_max / (gp.n_q - 1);
    for (int i = 0; i < gp.n_q; ++i) grid.q[static_cast<size_t>(i)] = -gp.q_max + i * dq;
    grid.p = grid.q;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(gp.n_q, gp.n_q);

    for (const auto& s : slices) {
        // Two resolutions; the h^2 ramp-kink error cancels in (4 fine - coarse)/3.
        const FilteredSlice fine = filter_slice(s.r, s.chi, 1);
        const FilteredSlice coarse = filter_slice(s.r, s.chi, 2);
        const double c = std::cos(s.theta), sn = std::sin(s.theta);
        for (int i = 0; i < gp.n_q; ++i)
            for (int j = 0; j < gp.n_q; ++j) {
                const double xp = grid.q[static_cast<size_t>(i)] * c +
                                  grid.p[static_cast<size_t>(j)] * sn;
                const Complex v = (4.0 * fine.sample(xp) - coarse.sample(xp)) / 3.0;
                acc(i, j) += v;
            }
    }
    acc *= dth / (2.0 * M_PI * coverage);

    const double imag_residue = acc.imag().cwiseAbs().maxCoeff();
    if (imag_residue > 1e-6)
        std::fprintf(stderr, "warning: discarding imaginary residue %.3g in the Wigner grid\n",
                     imag_residue);
    grid.w = acc.real();
    return grid;
}

WignerGrid symplectic_fourier_cartesian(const std::vector<CharacteristicSlice>& slices,
                                        const GridParams& gp) {
    check_fan(slices, gp);
    const double dth = slices[1].theta - slices[0].theta;
    const size_t n_th = slices.size();
    const size_t n_r = slices[0].r.size();
    const long half = static_cast<long>(n_r / 2);
    const double dr = slices[0].r[1] - slices[0].r[0];

    // Polar interpolator: theta is reduced modulo the half-turn with an
    // r-sign flip, cubic in both directions.
    auto chi_on_ray = [&](size_t k, double rr) -> Complex {
        const double t = rr / dr;
        const auto i1 = static_cast<long>(std::floor(t));
        const double f = t - i1;
        auto at = [&](long i) -> Complex {
            if (i < -half || i > half) return 0.0;
            return slices[k].chi[static_cast<size_t>(i + half)];
        };
        const Complex p0 = at(i1 - 1), p1 = at(i1), p2 = at(i1 + 1), p3 = at(i1 + 2);
        return 0.5 * (2.0 * p1 + f * ((p2 - p0) +
                      f * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                      f * (3.0 * (p1 - p2) + p3 - p0))));
    };
    auto chi_polar = [&](double rr, double th) -> Complex {
        // Index into the fan without reducing the angle first; stencil legs
        // that wrap past the fan span pick up the half-turn r-flip.
        const double u = th / dth;
        const auto k1 = static_cast<long>(std::floor(u));
        const double f = u - k1;
        Complex vals[4];
        for (long o = -1; o <= 2; ++o) {
            const long k = k1 + o;
            const long n = static_cast<long>(n_th);
            const long wrapped = ((k % n) + n) % n;
            const long turns = (k - wrapped) / n;
            const double flip = (!gp.full_circle && (turns % 2 != 0)) ? -1.0 : 1.0;
            vals[o + 1] = chi_on_ray(static_cast<size_t>(wrapped), flip * rr);
        }
        return 0.5 * (2.0 * vals[1] + f * ((vals[2] - vals[0]) +
                      f * ((2.0 * vals[0] - 5.0 * vals[1] + 4.0 * vals[2] - vals[3]) +
                      f * (3.0 * (vals[1] - vals[2]) + vals[3] - vals[0]))));
    };

    // Cartesian sampling of the characteristic function.
    const double du = 2.0 * dr;
    const auto half_u = static_cast<long>(std::lround(slices[0].r.back() / du));
    const auto n_u = static_cast<size_t>(2 * half_u + 1);
    Eigen::MatrixXcd cart(n_u, n_u);
    for (long a = -half_u; a <= half_u; ++a)
        for (long b = -half_u; b <= half_u; ++b) {
            const double u = a * du, v = b * du;
            const double rr = std::hypot(u, v);
            if (rr > slices[0].r.back()) {
                cart(a + half_u, b + half_u) = 0.0;
                continue;
            }
            const double th = std::atan2(v, u);
            cart(a + half_u, b + half_u) = chi_polar(rr, th);
        }

    WignerGrid grid;
    grid.q.resize(static_cast<size_t>(gp.n_q));
    grid.p.resize(static_cast<size_t>(gp.n_q));
    const double dq = 2.0 * gp.q_max / (gp.n_q - 1);
    for (int i = 0; i < gp.n_q; ++i) grid.q[static_cast<size_t>(i)] = -gp.q_max + i * dq;
    grid.p = grid.q;

    // Separable Fourier sum as two dense products.
    Eigen::MatrixXcd eq(gp.n_q, n_u), ep(n_u, gp.n_q);
    for (int i = 0; i < gp.n_q; ++i)
        for (long a = -half_u; a <= half_u; ++a) {
            eq(i, a + half_u) = std::exp(Complex(0.0, -grid.q[static_cast<size_t>(i)] * a * du));
            ep(a + half_u, i) = std::exp(Complex(0.0, -grid.p[static_cast<size_t>(i)] * a * du));
        }
    const Eigen::MatrixXcd res = eq * cart * ep * (du * du / (2.0 * M_PI));

    const double imag_residue = res.imag().cwiseAbs().maxCoeff();
    if (imag_residue > 1e-6)
        std::fprintf(stderr, "warning: discarding imaginary residue %.3g in the Wigner grid\n",
                     imag_residue);
    grid.w = res.real();
    return grid;
}

namespace {

std::vector<CharacteristicSlice> scan_slices(const GaussianState& s, const LocalOscillator& lo,
                                             const DetectorModel& det, const GridParams& gp) {
    const double span = gp.full_circle ? 2.0 * M_PI : M_PI;
    std::vector<CharacteristicSlice> slices;
    slices.reserve(static_cast<size_t>(gp.n_theta));
    const double bound = M_PI * lo.gamma0;
    for (int k = 0; k < gp.n_theta; ++k) {
        const double theta = span * k / gp.n_theta;
        const auto rx = quadrature_distribution(s, lo, det, theta, gp.x_max);
        auto slice = characteristic_from_marginal(rx, gp.r_max, gp.dr);
        slice = clip_boundary(slice, lo.gamma0);
        if (slice.clipped_fraction >= 1e-8) apodize(slice.chi, slice.r, bound);
        slices.push_back(std::move(slice));
    }
    return slices;
}

}  // namespace

WignerGrid reconstruct(const GaussianState& s, const LocalOscillator& lo,
                       const DetectorModel& det, const GridParams& gp) {
    if (gp.n_theta < 8 || gp.n_theta % 2 != 0)
        throw std::invalid_argument("reconstruct needs an even angle count of at least 8");
    const auto slices = scan_slices(s, lo, det, gp);
    WignerGrid grid = symplectic_fourier(slices, gp);

    // Angular aliasing guard: the fan at half density must tell the same story.
    std::vector<CharacteristicSlice> half;
    half.reserve(slices.size() / 2);
    for (size_t k = 0; k < slices.size(); k += 2) half.push_back(slices[k]);
    const WignerGrid coarse = symplectic_fourier(half, gp);
    const double scale = grid.w.cwiseAbs().maxCoeff();
    const double drift = (grid.w - coarse.w).cwiseAbs().maxCoeff();
    if (drift > 5e-3 * std::max(1.0, scale))
        throw std::runtime_error(
            "angular sampling too coarse for this state; increase the angle count");
    return grid;
}

}  // namespace homtom
