#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "robin/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Optimal thermal insulation under Robin boundary conditions"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    CLI::App* run = app.add_subcommand("run", "run an experiment described by a config file");
    run->add_option("config", config_path, "path to the experiment config")->required();
    run->add_option("--output-dir", output_dir, "override the config's output directory");

    double R = 1.0, beta = 1.0, h = 1.0, eps = 0.0;
    int n = 2;
    CLI::App* oracle = app.add_subcommand("oracle", "closed-form radial solution for a ball");
    oracle->set_help_flag("--help", "print help");  // frees -h for the thickness option
    oracle->add_option("--output-dir", output_dir, "where to write summary.json");
    oracle->add_option("--R", R, "ball radius")->required();
    oracle->add_option("--n", n, "space dimension");
    oracle->add_option("--beta", beta, "convection coefficient")->required();
    oracle->add_option("--h", h, "uniform insulation thickness")->required();
    oracle->add_option("--eps", eps, "layer conductivity (omit for the limit problem)");

    CLI11_PARSE(app, argc, argv);

    try {
        robin::ExperimentConfig cfg;
        if (run->parsed()) {
            cfg = robin::ExperimentConfig::from_file(config_path);
            if (!output_dir.empty()) cfg.output_dir = output_dir;
        } else {
            cfg.experiment = robin::ExperimentKind::oracle;
            cfg.oracle_R = R;
            cfg.oracle_n = n;
            cfg.beta = beta;
            cfg.oracle_h = h;
            cfg.oracle_eps = eps;
            cfg.output_dir = output_dir.empty() ? "." : output_dir;
        }
        robin::json summary;
        try {
            summary = robin::run_experiment(cfg);
        } catch (const robin::ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        }
        std::cout << summary["results"].dump(2) << "\n";
    } catch (const robin::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
