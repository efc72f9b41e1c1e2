#include "homtom/grid_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace homtom {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(17);
    return out;
}

void check_grid(const WignerGrid& g) {
    if (g.q.empty() || g.p.empty()) throw std::invalid_argument("empty grid axes");
    if (g.w.rows() != static_cast<Eigen::Index>(g.q.size()) ||
        g.w.cols() != static_cast<Eigen::Index>(g.p.size()))
        throw std::invalid_argument("grid value shape does not match axes");
}

}  // namespace

void write_grid_csv(const WignerGrid& g, const std::string& path) {
    check_grid(g);
    auto out = open_out(path);
    out << "# wigner_grid schema_version=" << kSchemaVersion << " convention=" << g.convention
        << " nq=" << g.q.size() << " np=" << g.p.size() << "\n";
    out << "q,p,w\n";
    for (size_t i = 0; i < g.q.size(); ++i)
        for (size_t j = 0; j < g.p.size(); ++j)
            out << g.q[i] << "," << g.p[j] << ","
                << g.w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << "\n";
    if (!out) throw std::runtime_error("write failed for " + path);
}

WignerGrid read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# wigner_grid", 0) != 0)
        throw std::runtime_error(path + ": not a wigner grid file");

    WignerGrid g;
    size_t nq = 0, np = 0;
    std::istringstream head(line.substr(2));
    std::string tok;
    while (head >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "schema_version" && std::stoi(val) != kSchemaVersion)
            throw std::runtime_error(path + ": unsupported schema version " + val);
        if (key == "convention") g.convention = val;
        if (key == "nq") nq = std::stoul(val);
        if (key == "np") np = std::stoul(val);
    }
    if (nq == 0 || np == 0) throw std::runtime_error(path + ": missing grid dimensions");

    std::getline(in, line);  // column header
    g.q.resize(nq);
    g.p.resize(np);
    g.w.resize(static_cast<Eigen::Index>(nq), static_cast<Eigen::Index>(np));
    for (size_t i = 0; i < nq; ++i)
        for (size_t j = 0; j < np; ++j) {
            if (!std::getline(in, line))
                throw std::runtime_error(path + ": truncated grid data");
            std::istringstream row(line);
            double q, p, w;
            char c1, c2;
            if (!(row >> q >> c1 >> p >> c2 >> w) || c1 != ',' || c2 != ',')
                throw std::runtime_error(path + ": malformed row '" + line + "'");
            g.q[i] = q;
            g.p[j] = p;
            g.w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
        }
    return g;
}

void write_grid_json(const WignerGrid& g, const std::string& path) {
    check_grid(g);
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "wigner_grid";
    j["convention"] = g.convention;
    j["q"] = g.q;
    j["p"] = g.p;
    auto& w = j["w"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < g.w.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < g.w.cols(); ++k) row.push_back(g.w(i, k));
        w.push_back(std::move(row));
    }
    auto out = open_out(path);
    out << j.dump(1) << "\n";
}

WignerGrid read_grid_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    if (j.value("kind", "") != "wigner_grid")
        throw std::runtime_error(path + ": not a wigner grid file");
    if (j.value("schema_version", -1) != kSchemaVersion)
        throw std::runtime_error(path + ": unsupported schema version");

    WignerGrid g;
    g.convention = j.value("convention", "density");
    g.q = j.at("q").get<std::vector<double>>();
    g.p = j.at("p").get<std::vector<double>>();
    const auto& w = j.at("w");
    if (w.size() != g.q.size()) throw std::runtime_error(path + ": value rows mismatch q axis");
    g.w.resize(static_cast<Eigen::Index>(g.q.size()), static_cast<Eigen::Index>(g.p.size()));
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i].size() != g.p.size())
            throw std::runtime_error(path + ": value row length mismatch p axis");
        for (size_t k = 0; k < g.p.size(); ++k)
            g.w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = w[i][k];
    }
    return g;
}

void write_curve_csv(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
    if (columns.empty()) throw std::invalid_argument("curve table needs columns");
    auto out = open_out(path);
    out << "# curve schema_version=" << kSchemaVersion << "\n";
    for (size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::invalid_argument("curve row width does not match header");
        for (size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace homtom
