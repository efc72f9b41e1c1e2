#include "homtom/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace homtom {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at " + path + ": " + what);
}

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
    }
}

double number_at(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

int int_at(const json& j, const std::string& path, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return j[key].get<int>();
}

// A mode vector entry is a plain number or an [re, im] pair.
ModeVector mode_at(const json& j, const std::string& path, const char* key, int modes) {
    const json& arr = j[key];
    const std::string where = path + "." + key;
    if (!arr.is_array()) fail(where, "expected an array of amplitudes");
    if (static_cast<int>(arr.size()) != modes)
        fail(where, "expected " + std::to_string(modes) + " entries");
    ModeVector v(modes);
    for (int i = 0; i < modes; ++i) {
        const json& e = arr[static_cast<size_t>(i)];
        if (e.is_number())
            v(i) = e.get<double>();
        else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
            v(i) = Complex(e[0].get<double>(), e[1].get<double>());
        else
            fail(where + "[" + std::to_string(i) + "]", "expected a number or [re, im]");
    }
    return v;
}

ModeVector basis_mode(int modes, int index, const std::string& path) {
    if (index < 0 || index >= modes) fail(path, "mode index out of range");
    ModeVector v = ModeVector::Zero(modes);
    v(index) = 1.0;
    return v;
}

}  // namespace

GaussianState ExperimentConfig::make_state() const {
    if (state_kind == "vacuum") return vacuum_state(modes);
    if (state_kind == "coherent") {
        CoherentSpec spec;
        spec.phi = amplitudes;
        return coherent_wigner(spec);
    }
    if (state_kind == "squeezed") {
        SqueezeSpec spec;
        spec.xi = xi;
        spec.theta = state_mode.size() ? state_mode : gamma_mode;
        return squeezed_vacuum(spec);
    }
    throw ConfigError("config error at state.kind: '" + state_kind +
                      "' has no Gaussian phase-space form");
}

LocalOscillator ExperimentConfig::make_lo(double theta) const {
    LocalOscillator lo;
    lo.gamma0 = gamma0;
    lo.theta = theta;
    lo.gamma_mode = gamma_mode;
    return lo;
}

DetectorModel ExperimentConfig::make_detector() const {
    DetectorModel det;
    det.kind = det_kind;
    det.eta = eta;
    if (det_kind == DetectorKind::single_mode)
        det.mode = det_mode.size() ? det_mode : gamma_mode;
    return det;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
    reject_unknown(j, "config",
                   {"modes", "state", "lo", "detector", "grid", "numerics", "tolerances",
                    "figures"});

    ExperimentConfig cfg;
    cfg.modes = int_at(j, "config", "modes", 1);
    if (cfg.modes < 1) fail("config.modes", "needs at least one mode");

    if (j.contains("lo")) {
        const json& lo = j["lo"];
        reject_unknown(lo, "lo", {"gamma0", "mode", "mode_index", "theta_count"});
        cfg.gamma0 = number_at(lo, "lo", "gamma0", cfg.gamma0);
        if (cfg.gamma0 <= 0.0) fail("lo.gamma0", "must be positive");
        cfg.n_theta = int_at(lo, "lo", "theta_count", cfg.n_theta);
        if (lo.contains("mode") && lo.contains("mode_index"))
            fail("lo.mode_index", "give either coefficients or an index, not both");
        if (lo.contains("mode"))
            cfg.gamma_mode = mode_at(lo, "lo", "mode", cfg.modes);
        else if (lo.contains("mode_index"))
            cfg.gamma_mode = basis_mode(cfg.modes, int_at(lo, "lo", "mode_index", 0),
                                        "lo.mode_index");
    }
    if (cfg.gamma_mode.size() == 0) cfg.gamma_mode = basis_mode(cfg.modes, 0, "lo");
    if (std::abs(cfg.gamma_mode.norm() - 1.0) > 1e-9) fail("lo.mode", "must be normalized");

    if (j.contains("state")) {
        const json& st = j["state"];
        reject_unknown(st, "state", {"kind", "amplitudes", "n", "mode", "mode_index", "xi"});
        if (!st.contains("kind") || !st["kind"].is_string())
            fail("state.kind", "expected a string");
        cfg.state_kind = st["kind"].get<std::string>();
        const std::set<std::string> kinds = {"vacuum", "coherent", "fock", "squeezed"};
        if (!kinds.count(cfg.state_kind)) fail("state.kind", "unknown state '" + cfg.state_kind + "'");
        if (st.contains("amplitudes")) {
            if (cfg.state_kind != "coherent") fail("state.amplitudes", "only for coherent states");
            cfg.amplitudes = mode_at(st, "state", "amplitudes", cfg.modes);
        }
        if (cfg.state_kind == "coherent" && cfg.amplitudes.size() == 0)
            fail("state.amplitudes", "required for coherent states");
        cfg.fock_n = int_at(st, "state", "n", cfg.fock_n);
        if (cfg.fock_n < 0) fail("state.n", "photon number must be nonnegative");
        cfg.xi = number_at(st, "state", "xi", cfg.xi);
        if (cfg.xi < 0.0) fail("state.xi", "squeezing parameter must be nonnegative");
        if (st.contains("mode") && st.contains("mode_index"))
            fail("state.mode_index", "give either coefficients or an index, not both");
        if (st.contains("mode"))
            cfg.state_mode = mode_at(st, "state", "mode", cfg.modes);
        else if (st.contains("mode_index"))
            cfg.state_mode = basis_mode(cfg.modes, int_at(st, "state", "mode_index", 0),
                                        "state.mode_index");
        if (cfg.state_mode.size() && std::abs(cfg.state_mode.norm() - 1.0) > 1e-9)
            fail("state.mode", "must be normalized");
    }

    if (j.contains("detector")) {
        const json& det = j["detector"];
        reject_unknown(det, "detector", {"kind", "eta", "mode", "mode_index"});
        if (det.contains("kind")) {
            if (!det["kind"].is_string()) fail("detector.kind", "expected a string");
            const std::string kind = det["kind"].get<std::string>();
            if (kind == "bucket")
                cfg.det_kind = DetectorKind::bucket;
            else if (kind == "single_mode")
                cfg.det_kind = DetectorKind::single_mode;
            else
                fail("detector.kind", "unknown detector '" + kind + "'");
        }
        cfg.eta = number_at(det, "detector", "eta", cfg.eta);
        if (cfg.eta <= 0.0 || cfg.eta > 1.0) fail("detector.eta", "must lie in (0, 1]");
        if (det.contains("mode") && det.contains("mode_index"))
            fail("detector.mode_index", "give either coefficients or an index, not both");
        if (det.contains("mode"))
            cfg.det_mode = mode_at(det, "detector", "mode", cfg.modes);
        else if (det.contains("mode_index"))
            cfg.det_mode = basis_mode(cfg.modes, int_at(det, "detector", "mode_index", 0),
                                      "detector.mode_index");
        if (cfg.det_mode.size() && std::abs(cfg.det_mode.norm() - 1.0) > 1e-9)
            fail("detector.mode", "must be normalized");
    }

    if (j.contains("grid")) {
        const json& g = j["grid"];
        reject_unknown(g, "grid", {"range", "points"});
        cfg.grid.q_max = number_at(g, "grid", "range", cfg.grid.q_max);
        if (cfg.grid.q_max <= 0.0) fail("grid.range", "must be positive");
        cfg.grid.n_q = int_at(g, "grid", "points", cfg.grid.n_q);
        if (cfg.grid.n_q < 3) fail("grid.points", "needs at least three points");
    }

    if (j.contains("numerics")) {
        const json& n = j["numerics"];
        reject_unknown(n, "numerics",
                       {"theta_samples", "x_max", "r_max", "dr", "epsilon_reg", "full_circle"});
        if (n.contains("theta_samples")) {
            const int nt = int_at(n, "numerics", "theta_samples", cfg.n_theta);
            if (j.contains("lo") && j["lo"].contains("theta_count") && nt != cfg.n_theta)
                fail("numerics.theta_samples", "conflicts with lo.theta_count");
            cfg.n_theta = nt;
        }
        cfg.grid.x_max = number_at(n, "numerics", "x_max", cfg.grid.x_max);
        cfg.grid.r_max = number_at(n, "numerics", "r_max", cfg.grid.r_max);
        cfg.grid.dr = number_at(n, "numerics", "dr", cfg.grid.dr);
        if (cfg.grid.x_max <= 0.0) fail("numerics.x_max", "must be positive");
        if (cfg.grid.r_max <= 0.0 || cfg.grid.dr <= 0.0 || cfg.grid.dr > cfg.grid.r_max)
            fail("numerics.dr", "needs 0 < dr <= r_max");
        cfg.epsilon_reg = number_at(n, "numerics", "epsilon_reg", cfg.epsilon_reg);
        if (cfg.epsilon_reg < 0.0) fail("numerics.epsilon_reg", "must be nonnegative");
        if (n.contains("full_circle")) {
            if (!n["full_circle"].is_boolean()) fail("numerics.full_circle", "expected a boolean");
            cfg.grid.full_circle = n["full_circle"].get<bool>();
        }
    }
    if (cfg.n_theta < 8 || cfg.n_theta % 2) fail("lo.theta_count", "needs an even count of at least 8");
    cfg.grid.n_theta = cfg.n_theta;

    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        reject_unknown(t, "tolerances", {"sup", "norm", "l2"});
        cfg.sup_tol = number_at(t, "tolerances", "sup", cfg.sup_tol);
        cfg.norm_tol = number_at(t, "tolerances", "norm", cfg.norm_tol);
        cfg.l2_tol = number_at(t, "tolerances", "l2", cfg.l2_tol);
        if (cfg.sup_tol <= 0.0) fail("tolerances.sup", "must be positive");
        if (cfg.norm_tol <= 0.0) fail("tolerances.norm", "must be positive");
    }

    cfg.fig_mu = {0.0, 0.25, 0.5, 0.75, 1.0};
    if (j.contains("figures")) {
        const json& f = j["figures"];
        reject_unknown(f, "figures", {"mu_values", "xi_max", "points"});
        if (f.contains("mu_values")) {
            if (!f["mu_values"].is_array() || f["mu_values"].empty())
                fail("figures.mu_values", "expected a nonempty array");
            cfg.fig_mu.clear();
            for (size_t i = 0; i < f["mu_values"].size(); ++i) {
                const json& e = f["mu_values"][i];
                if (!e.is_number())
                    fail("figures.mu_values[" + std::to_string(i) + "]", "expected a number");
                const double mu = e.get<double>();
                if (mu < 0.0 || mu > 1.0)
                    fail("figures.mu_values[" + std::to_string(i) + "]", "must lie in [0, 1]");
                cfg.fig_mu.push_back(mu);
            }
        }
        cfg.fig_xi_max = number_at(f, "figures", "xi_max", cfg.fig_xi_max);
        cfg.fig_points = int_at(f, "figures", "points", cfg.fig_points);
        if (cfg.fig_xi_max <= 0.0) fail("figures.xi_max", "must be positive");
        if (cfg.fig_points < 2) fail("figures.points", "needs at least two points");
    }

    // Exercise the module-level validators now so bad combinations are
    // reported as configuration problems with the field in the message.
    try {
        cfg.make_lo().validate();
        cfg.make_detector().validate(cfg.modes);
        if (cfg.state_kind != "fock") cfg.make_state().validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace homtom
