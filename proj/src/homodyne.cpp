#include "homtom/homodyne.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

namespace homtom {

void DetectorModel::validate(Eigen::Index modes) const {
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("detector efficiency must lie in (0, 1]");
    if (kind == DetectorKind::single_mode) {
        if (mode.size() != modes)
            throw std::invalid_argument("detector mode dimension does not match the state");
        if (!is_normalized(mode)) throw std::invalid_argument("detector mode not normalized");
    }
}

Kernel DetectorModel::d_kernel(Eigen::Index modes) const {
    validate(modes);
    if (kind == DetectorKind::bucket) return eta * Kernel::Identity(modes, modes);
    return eta * (mode * mode.adjoint());
}

double DetectorModel::lambda(Eigen::Index modes) const {
    validate(modes);
    return kind == DetectorKind::bucket ? eta * static_cast<double>(modes) : eta;
}

void LocalOscillator::validate() const {
    if (!(gamma0 > 0.0)) throw std::invalid_argument("local oscillator magnitude must be positive");
    if (!is_normalized(gamma_mode))
        throw std::invalid_argument("local oscillator mode not normalized");
}

ModeVector LocalOscillator::field() const {
    validate();
    return gamma0 * std::exp(Complex(0.0, theta - 0.5 * M_PI)) * gamma_mode;
}

void PhotonDistribution::validate() const {
    double s = 0.0;
    for (double v : p) {
        if (v < 0.0) throw std::invalid_argument("photon distribution has a negative entry");
        s += v;
    }
    if (s > 1.0 + 1e-9) throw std::invalid_argument("photon distribution sums above 1");
}

double PhotonDistribution::total() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
}

double CrossCorrelation::at(int m) const {
    if (m < -n_max || m > n_max) throw std::out_of_range("correlation index out of range");
    return r[static_cast<size_t>(m + n_max)];
}

Complex CorrelationSweep::at(int m) const {
    if (m < -n_max || m > n_max) throw std::out_of_range("correlation index out of range");
    return r[static_cast<size_t>(m + n_max)];
}

void QuadratureDistribution::validate() const {
    for (double v : r)
        if (v < -1e-9) throw std::runtime_error("quadrature distribution below the noise floor");
}

MkJk mk_jk(Complex k) {
    if (std::abs(k + 1.0) < 1e-14) throw std::invalid_argument("generating parameter pole at K = -1");
    const Complex onepk = 1.0 + k;
    return {4.0 * k / (onepk * onepk), (1.0 - k) / onepk};
}

CrossCorrelation cross_correlate(const PhotonDistribution& p1, const PhotonDistribution& p2) {
    p1.validate();
    p2.validate();
    const int n1 = static_cast<int>(p1.p.size());
    const int n2 = static_cast<int>(p2.p.size());
    const int n_max = std::max(n1, n2) - 1;
    CrossCorrelation c;
    c.n_max = n_max;
    c.r.assign(2 * static_cast<size_t>(n_max) + 1, 0.0);
    for (int n = 0; n < n1; ++n)
        for (int k = 0; k < n2; ++k) c.r[static_cast<size_t>(k - n + n_max)] += p1.p[n] * p2.p[k];
    return c;
}

Complex generating_product(const GeneratingFn& g1, const GeneratingFn& g2, Complex k) {
    if (std::abs(k) == 0.0)
        throw std::invalid_argument("generating product needs K != 0 for the inverse argument");
    return g1(k) * g2(1.0 / k);
}

ForwardInput forward_input(const GaussianState& s) {
    return {s.quadA, s.quadB, s.displacement, Complex(s.logPrefactor, 0.0)};
}

Complex homodyne_generating(const ForwardInput& in, const LocalOscillator& lo,
                            const DetectorModel& det, Complex k) {
    const auto m = in.quadA.rows();
    lo.validate();
    if (lo.gamma_mode.size() != m)
        throw std::invalid_argument("local oscillator dimension does not match the state");
    const auto [mk, jk] = mk_jk(k);
    if (std::abs(mk) == 0.0) return 0.0;  // K = 0 with positive detector trace

    const Kernel d = det.d_kernel(m);
    const double lam = det.lambda(m);
    const ModeVector gamma = lo.field();
    const Complex j2 = jk * jk;

    // Difference-count kernel combined with the state, centered on the
    // state displacement z = alpha - d0.  The measurement exponent
    // i2J (gamma*.D.alpha - alpha*.D.gamma) + 2J^2 alpha*.D.alpha
    // contributes quadratic, linear, and constant pieces in z.
    const ModeVector dg = d * gamma;
    const ModeVector dd = d * in.displacement;
    const Complex i2j = Complex(0.0, 2.0) * jk;

    const Kernel aq = in.quadA - j2 * d;
    // Coefficient vectors of z and z-bar; the first is handed over conjugated.
    const ModeVector cz = std::conj(i2j) * dg + std::conj(2.0 * j2) * dd;
    const ModeVector czbar = -i2j * dg + 2.0 * j2 * dd;
    const Complex at_center =
        i2j * (diamond(gamma, d, in.displacement) - diamond(in.displacement, d, gamma)) +
        2.0 * j2 * diamond(in.displacement, d, in.displacement);

    const auto r = gaussian_integral(aq, -in.quadB, cz, czbar);
    const Complex log_mk = std::log(4.0 * k) - 2.0 * std::log(1.0 + k);
    return std::exp(lam * log_mk + in.logPrefactor + at_center + r.logAmplitude + r.exponent);
}

Complex homodyne_generating(const GaussianState& s, const LocalOscillator& lo,
                            const DetectorModel& det, Complex k) {
    return homodyne_generating(forward_input(s), lo, det, k);
}

namespace {

// One pass of the phase quadrature: midpoint grid in phi (avoids the K = -1
// pole), forward DFT, index and phase bookkeeping for signed m.
std::vector<Complex> phase_sweep(const ForwardInput& in, const LocalOscillator& lo,
                                 const DetectorModel& det, int n_max, int n_phi) {
    std::vector<Complex> samples(static_cast<size_t>(n_phi));
    const double h = 2.0 * M_PI / n_phi;
    for (int i = 0; i < n_phi; ++i) {
        const double phi = -M_PI + (i + 0.5) * h;
        samples[static_cast<size_t>(i)] =
            homodyne_generating(in, lo, det, std::exp(Complex(0.0, phi)));
    }
    fftw_plan plan = fftw_plan_dft_1d(n_phi, reinterpret_cast<fftw_complex*>(samples.data()),
                                      reinterpret_cast<fftw_complex*>(samples.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    std::vector<Complex> r(2 * static_cast<size_t>(n_max) + 1);
    for (int m = -n_max; m <= n_max; ++m) {
        const int idx = (m % n_phi + n_phi) % n_phi;
        const Complex phase = std::exp(Complex(0.0, m * (M_PI - 0.5 * h)));
        r[static_cast<size_t>(m + n_max)] = phase * samples[static_cast<size_t>(idx)] / double(n_phi);
    }
    return r;
}

}  // namespace

CorrelationSweep extract_R_sweep(const ForwardInput& in, const LocalOscillator& lo,
                                 const DetectorModel& det, int n_max) {
    if (n_max < 0) throw std::invalid_argument("extract_R_sweep: negative index range");
    int n_phi = 4096;
    while (n_phi < 4 * n_max + 4) n_phi *= 2;

    const auto coarse = phase_sweep(in, lo, det, n_max, n_phi);
    const auto fine = phase_sweep(in, lo, det, n_max, 2 * n_phi);
    double worst = 0.0, scale = 0.0;
    for (size_t i = 0; i < fine.size(); ++i) {
        worst = std::max(worst, std::abs(fine[i] - coarse[i]));
        scale = std::max(scale, std::abs(fine[i]));
    }
    if (worst > 1e-8 * std::max(1.0, scale))
        throw std::runtime_error("correlation quadrature did not converge under grid doubling");

    CorrelationSweep sweep;
    sweep.n_max = n_max;
    sweep.r = fine;
    return sweep;
}

double extract_R(const GaussianState& s, const LocalOscillator& lo, const DetectorModel& det,
                 int n) {
    const int n_max = std::max(std::abs(n), static_cast<int>(std::ceil(8.0 * lo.gamma0)));
    const auto sweep = extract_R_sweep(forward_input(s), lo, det, n_max);
    const Complex v = sweep.at(n);
    if (std::abs(v.imag()) > 1e-9)
        throw std::runtime_error("correlation coefficient has a nonreal residue");
    return v.real();
}

QuadratureDistribution quadrature_distribution(const GaussianState& s, const LocalOscillator& lo,
                                               const DetectorModel& det, double theta,
                                               double x_max) {
    LocalOscillator scan = lo;
    scan.theta = theta;
    // Count spacing is 1/(sqrt2 gamma0), so covering |x| <= x_max needs the
    // extra sqrt2.
    const int n_max = static_cast<int>(std::ceil(x_max * std::sqrt(2.0) * lo.gamma0));
    const auto sweep = extract_R_sweep(forward_input(s), scan, det, n_max);

    // Count index to quadrature units: x = n / (sqrt2 gamma0), so the vacuum
    // marginal is exp(-x^2)/sqrt(pi) and a coherent peak sits at eta q1.
    const double scale = std::sqrt(2.0) * lo.gamma0;
    QuadratureDistribution q;
    q.theta = theta;
    q.x.resize(sweep.r.size());
    q.r.resize(sweep.r.size());
    double sum = 0.0;
    for (int m = -n_max; m <= n_max; ++m) {
        const Complex v = sweep.at(m);
        if (std::abs(v.imag()) > 1e-9)
            throw std::runtime_error("correlation coefficient has a nonreal residue");
        q.x[static_cast<size_t>(m + n_max)] = m / scale;
        q.r[static_cast<size_t>(m + n_max)] = scale * v.real();
        sum += v.real();
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw std::runtime_error("quadrature distribution mass deviates from 1");
    for (auto& v : q.r) v /= sum;
    q.validate();
    return q;
}

namespace {

PairQuadForm splitter_conjugate(const PairQuadForm& f, Complex s) {
    // Mixing a' = (a + s b)/sqrt2, b' = (b + s a)/sqrt2 with s = +-i applied
    // as a sesquilinear substitution U* F U.
    const Complex sc = std::conj(s);
    PairQuadForm g;
    g.aa = 0.5 * (f.aa + s * f.ab + sc * f.ba + f.bb);
    g.ab = 0.5 * (s * f.aa + f.ab + f.ba + sc * f.bb);
    g.ba = 0.5 * (sc * f.aa + f.ab + f.ba + s * f.bb);
    g.bb = 0.5 * (f.aa + sc * f.ab + s * f.ba + f.bb);
    return g;
}

}  // namespace

PairQuadForm beamsplitter_forward(const PairQuadForm& f) { return splitter_conjugate(f, Complex(0.0, 1.0)); }

PairQuadForm beamsplitter_inverse(const PairQuadForm& f) { return splitter_conjugate(f, Complex(0.0, -1.0)); }

}  // namespace homtom
