#include "homtom/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "homtom/grid_io.hpp"
#include "json.hpp"

namespace homtom {

namespace {

std::vector<double> axis(const GridParams& gp) {
    std::vector<double> q(static_cast<size_t>(gp.n_q));
    const double d = 2.0 * gp.q_max / (gp.n_q - 1);
    for (int i = 0; i < gp.n_q; ++i) q[static_cast<size_t>(i)] = -gp.q_max + i * d;
    return q;
}

WignerGrid fill_grid(const GridParams& gp, const WignerClosure& f) {
    WignerGrid g;
    g.q = axis(gp);
    g.p = g.q;
    g.w.resize(gp.n_q, gp.n_q);
    for (int i = 0; i < gp.n_q; ++i)
        for (int j = 0; j < gp.n_q; ++j)
            g.w(i, j) = f(g.q[static_cast<size_t>(i)], g.p[static_cast<size_t>(j)]);
    return g;
}

double state_mu(const ExperimentConfig& cfg) {
    const ModeVector f = cfg.state_mode.size() ? cfg.state_mode : cfg.gamma_mode;
    return std::abs(diamond(cfg.gamma_mode, f));
}

/// Catalog closure in the detector-rescaled coordinates; the raw grid the
/// chain produces is f(q/eta, p/eta)/eta^2 on top of this.
WignerClosure catalog_closure(const ExperimentConfig& cfg) {
    KernelParams kp;
    kp.dx = 1.0 / cfg.gamma0;
    kp.eta = cfg.eta;

    if (cfg.state_kind == "vacuum")
        return [](double q, double p) { return 2.0 * std::exp(-q * q - p * p); };

    if (cfg.state_kind == "coherent") {
        const CoherentObserved obs =
            cfg.det_kind == DetectorKind::single_mode
                ? coherent_single_mode_observed(cfg.amplitudes, cfg.gamma_mode, kp)
                : coherent_bucket_observed(cfg.amplitudes, cfg.gamma_mode, kp);
        return [obs](double q, double p) { return obs.value(q, p); };
    }

    if (cfg.state_kind == "fock") {
        MismatchSpec mm;
        mm.mu = state_mu(cfg);
        const int n = cfg.fock_n;
        const double eta = cfg.eta;
        return [n, mm, eta](double q, double p) {
            return fock_observed_wigner(n, mm, eta, q, p);
        };
    }

    if (cfg.state_kind == "squeezed") {
        const ModeVector theta = cfg.state_mode.size() ? cfg.state_mode : cfg.gamma_mode;
        const auto sep = squeezed_separation(squeeze_kernel_a(cfg.xi, theta),
                                             squeeze_kernel_b(cfg.xi, theta), cfg.gamma_mode);
        const auto obs = squeezed_observed(squeezed_trace_coeffs(sep), kp);
        return [obs](double q, double p) { return obs.value(q, p); };
    }
    throw ConfigError("config error at state.kind: no catalog form for '" + cfg.state_kind + "'");
}

/// Number states are phase symmetric, so one marginal serves every scan
/// angle.  The marginal itself comes through the full counting chain on a
/// contour in the generating parameter.
QuadratureDistribution fock_chain_marginal(const ExperimentConfig& cfg) {
    const ModeVector f = cfg.state_mode.size() ? cfg.state_mode : cfg.gamma_mode;
    const LocalOscillator lo = cfg.make_lo();
    const DetectorModel det = cfg.make_detector();
    const int n_max =
        static_cast<int>(std::ceil(cfg.grid.x_max * std::sqrt(2.0) * cfg.gamma0));

    const int n_pts = 32;
    const double radius = 0.5;
    std::vector<Complex> coeff(static_cast<size_t>(2 * n_max + 1), 0.0);
    for (int k = 0; k < n_pts; ++k) {
        const double phi = 2.0 * M_PI * k / n_pts;
        const Complex jk = std::polar(radius, phi);
        const auto pt = fock_generating_point(f, jk);
        ForwardInput in;
        in.quadA = pt.quadA;
        in.quadB = Kernel::Zero(f.size(), f.size());
        in.displacement = ModeVector::Zero(f.size());
        in.logPrefactor = pt.logPrefactor;
        const auto sweep = extract_R_sweep(in, lo, det, n_max);
        const Complex weight = std::exp(Complex(0.0, -phi * cfg.fock_n)) /
                               (std::pow(radius, cfg.fock_n) * static_cast<double>(n_pts));
        for (int m = -n_max; m <= n_max; ++m)
            coeff[static_cast<size_t>(m + n_max)] += sweep.at(m) * weight;
    }

    QuadratureDistribution rx;
    rx.theta = 0.0;
    const double scale = std::sqrt(2.0) * cfg.gamma0;
    rx.x.resize(coeff.size());
    rx.r.resize(coeff.size());
    double mass = 0.0;
    for (size_t i = 0; i < coeff.size(); ++i) {
        if (std::abs(coeff[i].imag()) > 1e-8)
            throw std::runtime_error("count distribution has an imaginary residue");
        rx.x[i] = (static_cast<int>(i) - n_max) / scale;
        rx.r[i] = coeff[i].real() * scale;
        mass += rx.r[i] / scale;
    }
    for (auto& v : rx.r) v /= mass;
    return rx;
}

WignerGrid fock_chain_grid(const ExperimentConfig& cfg) {
    const auto rx = fock_chain_marginal(cfg);
    CharacteristicSlice base = characteristic_from_marginal(rx, cfg.grid.r_max, cfg.grid.dr);
    base = clip_boundary(base, cfg.gamma0);
    const double span = cfg.grid.full_circle ? 2.0 * M_PI : M_PI;
    std::vector<CharacteristicSlice> slices(static_cast<size_t>(cfg.grid.n_theta), base);
    for (int k = 0; k < cfg.grid.n_theta; ++k)
        slices[static_cast<size_t>(k)].theta = span * k / cfg.grid.n_theta;
    return symplectic_fourier(slices, cfg.grid);
}

std::filesystem::path out_path(const std::string& out_dir, const std::string& name) {
    std::filesystem::create_directories(out_dir);
    return std::filesystem::path(out_dir) / name;
}

void write_grid_pair(const WignerGrid& g, const std::string& out_dir, const std::string& stem) {
    write_grid_csv(g, out_path(out_dir, stem + ".csv").string());
    write_grid_json(g, out_path(out_dir, stem + ".json").string());
}

void write_figures(const ExperimentConfig& cfg, const std::string& out_dir) {
    // Number-state cut family over the mode overlap.
    {
        std::vector<std::vector<double>> rows;
        for (double mu : cfg.fig_mu) {
            MismatchSpec mm;
            mm.mu = mu;
            for (double q : axis(cfg.grid))
                rows.push_back({mu, q, fock_observed_wigner(cfg.fock_n, mm, 1.0, q, 0.0)});
        }
        write_curve_csv(out_path(out_dir, "fig_number_family.csv").string(), {"mu", "q", "w"},
                        rows);
    }

    // Purity and minimum spread against the squeezing parameter.
    std::vector<std::string> cols = {"xi"};
    for (double mu : cfg.fig_mu) {
        std::ostringstream label;
        label << "mu_" << std::setprecision(4) << mu;
        cols.push_back(label.str());
    }
    std::vector<std::vector<double>> purity_rows, sigma_rows;
    for (int i = 0; i < cfg.fig_points; ++i) {
        const double xi = cfg.fig_xi_max * i / (cfg.fig_points - 1);
        std::vector<double> pr = {xi}, sr = {xi};
        for (double mu : cfg.fig_mu) {
            MismatchSpec mm;
            mm.mu = mu;
            pr.push_back(purity(xi, mm));
            sr.push_back(sigma_min(xi, mm));
        }
        purity_rows.push_back(std::move(pr));
        sigma_rows.push_back(std::move(sr));
    }
    write_curve_csv(out_path(out_dir, "fig_purity.csv").string(), cols, purity_rows);
    write_curve_csv(out_path(out_dir, "fig_sigma_min.csv").string(), cols, sigma_rows);
}

}  // namespace

WignerGrid analytic_grid(const ExperimentConfig& cfg) {
    const WignerClosure f = catalog_closure(cfg);
    const double eta = cfg.eta;
    return fill_grid(cfg.grid, [&](double q, double p) {
        return f(q / eta, p / eta) / (eta * eta);
    });
}

WignerGrid simulate_grid(const ExperimentConfig& cfg) {
    if (cfg.state_kind == "fock") return fock_chain_grid(cfg);
    return reconstruct(cfg.make_state(), cfg.make_lo(), cfg.make_detector(), cfg.grid);
}

int cmd_analytic(const ExperimentConfig& cfg, const std::string& out_dir) {
    write_grid_pair(analytic_grid(cfg), out_dir, "wigner_analytic");
    write_figures(cfg, out_dir);
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir) {
    // Emit the per-angle quadrature distributions alongside the grid.
    std::vector<std::vector<double>> rows;
    if (cfg.state_kind == "fock") {
        const auto rx = fock_chain_marginal(cfg);
        for (size_t i = 0; i < rx.x.size(); ++i) rows.push_back({0.0, rx.x[i], rx.r[i]});
    } else {
        const GaussianState s = cfg.make_state();
        const DetectorModel det = cfg.make_detector();
        const double span = cfg.grid.full_circle ? 2.0 * M_PI : M_PI;
        for (int k = 0; k < cfg.grid.n_theta; ++k) {
            const auto rx = quadrature_distribution(s, cfg.make_lo(span * k / cfg.grid.n_theta),
                                                    det, span * k / cfg.grid.n_theta,
                                                    cfg.grid.x_max);
            for (size_t i = 0; i < rx.x.size(); ++i)
                rows.push_back({rx.theta, rx.x[i], rx.r[i]});
        }
    }
    write_curve_csv(out_path(out_dir, "quadratures.csv").string(), {"theta", "x", "r"}, rows);
    write_grid_pair(simulate_grid(cfg), out_dir, "wigner_sim");
    return 0;
}

int cmd_compare(const ExperimentConfig& cfg, const std::string& out_dir,
                ComparisonReport* report) {
    const WignerGrid sim = simulate_grid(cfg);
    const WignerGrid ref = analytic_grid(cfg);
    write_grid_pair(sim, out_dir, "wigner_sim");
    write_grid_pair(ref, out_dir, "wigner_analytic");

    ComparisonReport r;
    const double dq = sim.q[1] - sim.q[0];
    const double cell = dq * dq / (2.0 * M_PI);
    double l2 = 0.0;
    for (Eigen::Index i = 0; i < sim.w.rows(); ++i)
        for (Eigen::Index j = 0; j < sim.w.cols(); ++j) {
            const double d = sim.w(i, j) - ref.w(i, j);
            r.sup_error = std::max(r.sup_error, std::abs(d));
            l2 += d * d * cell;
        }
    r.l2_error = std::sqrt(l2);
    r.norm_residual_sim = std::abs(grid_moments(sim).mass - 1.0);
    r.norm_residual_ref = std::abs(grid_moments(ref).mass - 1.0);
    r.sim_stats = moment_stats(sim);
    r.ref_stats = moment_stats(ref);
    r.pass = r.sup_error < cfg.sup_tol && r.norm_residual_sim < cfg.norm_tol &&
             r.norm_residual_ref < cfg.norm_tol &&
             (cfg.l2_tol <= 0.0 || r.l2_error < cfg.l2_tol);

    auto stats_json = [](const MomentStats& m) {
        return nlohmann::json{{"purity", m.purity},
                              {"sigma_min", m.sigma_min},
                              {"sigma_max", m.sigma_max},
                              {"mean_q", m.mean_q},
                              {"mean_p", m.mean_p}};
    };
    nlohmann::json j{
        {"schema_version", kSchemaVersion},
        {"kind", "comparison_report"},
        {"sup_error", r.sup_error},
        {"l2_error", r.l2_error},
        {"norm_residual", {{"simulated", r.norm_residual_sim}, {"reference", r.norm_residual_ref}}},
        {"stats", {{"simulated", stats_json(r.sim_stats)}, {"reference", stats_json(r.ref_stats)}}},
        {"tolerances", {{"sup", cfg.sup_tol}, {"norm", cfg.norm_tol}, {"l2", cfg.l2_tol}}},
        {"pass", r.pass}};
    std::ofstream out(out_path(out_dir, "report.json"));
    if (!out) throw std::runtime_error("cannot write report.json");
    out << std::setprecision(17) << j.dump(1) << "\n";

    if (report) *report = r;
    return r.pass ? 0 : 2;
}

int cmd_figures(const ExperimentConfig& cfg, const std::string& out_dir) {
    write_figures(cfg, out_dir);
    return 0;
}

}  // namespace homtom
