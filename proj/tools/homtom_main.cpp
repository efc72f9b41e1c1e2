#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "homtom/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"optical homodyne tomography laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";

    auto add_sub = [&](const char* name, const char* desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("config", config_path, "experiment configuration file")->required();
        sub->add_option("--out", out_dir, "output directory");
        return sub;
    };
    CLI::App* analytic = add_sub("analytic", "closed-form observed state and figure curves");
    CLI::App* simulate = add_sub("simulate", "measurement-chain reconstruction");
    CLI::App* compare = add_sub("compare", "both routes plus a comparison report");
    CLI::App* figures = add_sub("figures", "figure curve families only");

    CLI11_PARSE(app, argc, argv);

    homtom::ExperimentConfig cfg;
    try {
        cfg = homtom::load_config(config_path);
    } catch (const homtom::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (analytic->parsed()) return homtom::cmd_analytic(cfg, out_dir);
        if (simulate->parsed()) return homtom::cmd_simulate(cfg, out_dir);
        if (figures->parsed()) return homtom::cmd_figures(cfg, out_dir);
        if (compare->parsed()) {
            homtom::ComparisonReport report;
            const int rc = homtom::cmd_compare(cfg, out_dir, &report);
            std::cout << (report.pass ? "PASS" : "FAIL") << " sup_error=" << report.sup_error
                      << " l2_error=" << report.l2_error << "\n";
            return rc;
        }
        return 1;
    } catch (const homtom::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
