#include "homtom/core.hpp"

#include <cmath>
#include <stdexcept>

namespace homtom {

namespace {

void require_same_dim(Eigen::Index m, Eigen::Index n, const char* what) {
    if (m != n) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

ModeSpace::ModeSpace(int m) : dim(m) {
    if (m < 1) throw std::invalid_argument("ModeSpace: dimension must be at least 1");
}

Kernel ModeSpace::identity() const { return Kernel::Identity(dim, dim); }

ModeVector ModeSpace::basis(int i) const {
    if (i < 0 || i >= dim) throw std::invalid_argument("ModeSpace::basis: index out of range");
    ModeVector v = ModeVector::Zero(dim);
    v(i) = 1.0;
    return v;
}

ModeVector ModeSpace::zero() const { return ModeVector::Zero(dim); }

bool is_hermitian(const Kernel& k, double tol) {
    return (k - k.adjoint()).cwiseAbs().maxCoeff() < tol;
}

bool is_symmetric(const Kernel& k, double tol) {
    return (k - k.transpose()).cwiseAbs().maxCoeff() < tol;
}

bool is_idempotent(const Kernel& k, double tol) {
    return (k * k - k).cwiseAbs().maxCoeff() < tol;
}

bool is_normalized(const ModeVector& v, double tol) {
    return std::abs(v.norm() - 1.0) < tol;
}

Complex diamond(const ModeVector& a, const Kernel& k, const ModeVector& b) {
    require_same_dim(a.size(), k.rows(), "diamond");
    require_same_dim(k.cols(), b.size(), "diamond");
    return a.adjoint() * k * b;
}

Complex diamond(const ModeVector& a, const ModeVector& b) {
    require_same_dim(a.size(), b.size(), "diamond");
    return a.adjoint() * b;
}

Complex bilinear(const ModeVector& a, const Kernel& k, const ModeVector& b) {
    require_same_dim(a.size(), k.rows(), "bilinear");
    require_same_dim(k.cols(), b.size(), "bilinear");
    return a.transpose() * k * b;
}

ProjectorPair projectors(const ModeVector& gamma) {
    if (!is_normalized(gamma)) throw std::invalid_argument("projectors: mode function not normalized");
    const auto m = gamma.size();
    ProjectorPair pq;
    pq.p = gamma * gamma.adjoint();
    pq.q = Kernel::Identity(m, m) - pq.p;
    return pq;
}

DetInv rank1_det_inv(Complex c, const ModeVector& v) {
    const double n2 = v.squaredNorm();
    const Complex det = 1.0 + c * n2;
    if (std::abs(det) < 1e-14 * (1.0 + std::abs(c) * n2))
        throw std::invalid_argument("rank1_det_inv: singular update");
    const auto m = v.size();
    return DetInv{det, Kernel::Identity(m, m) - (c / det) * (v * v.adjoint())};
}

Complex log_det(const Kernel& k) {
    const double scale = k.cwiseAbs().maxCoeff();
    if (scale <= 0.0) throw std::invalid_argument("log_det: zero matrix");
    if ((k - k.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, scale)) {
        Eigen::SelfAdjointEigenSolver<Kernel> es;
        es.compute(k, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() > 0.0) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < k.rows(); ++i) s += std::log(es.eigenvalues()(i));
            return Complex(s, 0.0);
        }
    }
    Eigen::ComplexEigenSolver<Kernel> ces(k, false);
    Complex s = 0.0;
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        const Complex ev = ces.eigenvalues()(i);
        if (std::abs(ev) == 0.0) throw std::invalid_argument("log_det: singular matrix");
        s += std::log(ev);
    }
    return s;
}

void require_integrable(const Kernel& aq, const Kernel& bqq) {
    const Kernel ah = 0.5 * (aq + aq.adjoint());
    Eigen::SelfAdjointEigenSolver<Kernel> es;
    es.compute(ah, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= kPositiveEigThreshold)
        throw std::runtime_error("state not trace-normalizable: quadratic form not positive definite");
    if (bqq.cwiseAbs().maxCoeff() == 0.0) return;

    // With B-type terms present the convergence condition lives on the real
    // 2M-dimensional form; assemble it blockwise for b = x + i y.
    const auto m = aq.rows();
    const Eigen::MatrixXd ar = aq.real(), ai = aq.imag();
    const Eigen::MatrixXd cr = bqq.real(), ci = bqq.imag();
    Eigen::MatrixXd q(2 * m, 2 * m);
    q.topLeftCorner(m, m) = 2.0 * (ar - cr);
    q.bottomRightCorner(m, m) = 2.0 * (ar + cr);
    q.topRightCorner(m, m) = -2.0 * (ai + ci);
    q.bottomLeftCorner(m, m) = 2.0 * (ai - ci);
    const Eigen::MatrixXd qs = 0.5 * (q + q.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esr;
    esr.compute(qs, Eigen::EigenvaluesOnly);
    if (esr.eigenvalues().minCoeff() <= kPositiveEigThreshold)
        throw std::runtime_error("state not trace-normalizable: quadratic form not positive definite");
}

GaussianIntegralResult gaussian_integral(const Kernel& aq, const Kernel& bqq,
                                         const ModeVector& u, const ModeVector& v) {
    const auto m = aq.rows();
    require_same_dim(aq.cols(), m, "gaussian_integral");
    require_same_dim(bqq.rows(), m, "gaussian_integral");
    require_same_dim(bqq.cols(), m, "gaussian_integral");
    require_same_dim(u.size(), m, "gaussian_integral");
    require_same_dim(v.size(), m, "gaussian_integral");
    require_integrable(aq, bqq);

    const Eigen::PartialPivLU<Kernel> alu(aq);
    const Kernel ainv = alu.inverse();
    const Kernel k = aq.transpose() - bqq.conjugate() * ainv * bqq;

    GaussianIntegralResult r;
    r.logAmplitude = -0.5 * (log_det(aq) + log_det(k));

    // Stationary point of the exponent with sources a.b + b.conj(b):
    //   A b0 = B conj(b0) + v/2,  A^T conj(b0) = conj(B) b0 + conj(u)/2.
    const ModeVector a = u.conjugate();
    const ModeVector betaBar0 = 0.5 * Eigen::PartialPivLU<Kernel>(k).solve(bqq.conjugate() * (ainv * v) + a);
    const ModeVector beta0 = ainv * (bqq * betaBar0 + 0.5 * v);
    r.exponent = 0.5 * (a.cwiseProduct(beta0).sum() + v.cwiseProduct(betaBar0).sum());
    return r;
}

GaussianIntegralResult state_integral(const GaussianState& s, const ModeVector& u,
                                      const ModeVector& v) {
    // Shiftout the displacement, flip quadB into the integrand sign
    // convention, and fold the constant source terms into the amplitude.
    GaussianIntegralResult r = gaussian_integral(s.quadA, -s.quadB, u, v);
    const Complex shift = diamond(u, s.displacement) + diamond(s.displacement, v);
    r.logAmplitude += s.logPrefactor + shift;
    return r;
}

Complex state_trace(const GaussianState& s) {
    const ModeVector z = ModeVector::Zero(s.modes());
    return state_integral(s, z, z).value();
}

GaussianState vacuum_state(int modes) {
    ModeSpace ms(modes);
    return GaussianState{ms.identity(), Kernel::Zero(modes, modes), ms.zero(), 0.0};
}

void GaussianState::validate() const {
    const auto m = quadA.rows();
    if (quadA.cols() != m || quadB.rows() != m || quadB.cols() != m || displacement.size() != m)
        throw std::invalid_argument("GaussianState: inconsistent dimensions");
    const double scale = std::max(1.0, quadA.cwiseAbs().maxCoeff());
    if ((quadA - quadA.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale)
        throw std::invalid_argument("GaussianState: quadA must be hermitian");
    const double bscale = std::max(1.0, quadB.cwiseAbs().maxCoeff());
    if ((quadB - quadB.transpose()).cwiseAbs().maxCoeff() > kHermitianTol * bscale)
        throw std::invalid_argument("GaussianState: quadB must be symmetric");
    require_integrable(quadA, -quadB);
}

}  // namespace homtom
