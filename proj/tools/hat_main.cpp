#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hat/expand/config.hpp"
#include "hat/expand/experiment.hpp"
#include "hat/expand/report.hpp"
#include "hat/expand/strategy.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    std::vector<std::string> strategies;
    double eta = -1.0;
    int n_p = -1;
    double gamma = -1.0;
    std::string sweep_param;
    std::vector<double> sweep_values;
};

hat::expand::ExperimentConfig resolve_config(const CliOptions& opt) {
    auto cfg = opt.config_path.empty() ? hat::expand::ExperimentConfig{}
                                       : hat::expand::load_config(opt.config_path);
    if (opt.eta > 0.0) cfg.eta = opt.eta;
    if (opt.n_p > 0) cfg.n_p = opt.n_p;
    if (opt.gamma > 0.0) cfg.gamma = opt.gamma;
    if (opt.strategies.size() == 1) cfg.strategy = opt.strategies.front();
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"system-expansion simulator: low-traffic source selection, "
                 "attention fusion, adaptive distillation"};
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.config_path, "experiment config file");
    app.add_option("--seed", opt.seed, "base seed");
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--strategy", opt.strategies,
                   "strategy name (repeatable for grid); one of: hat, supervised, random, "
                   "accuracy_only, all, equal, nearest, weighted");
    app.add_option("--eta", opt.eta, "coarse keep ratio override");
    app.add_option("--np", opt.n_p, "selected source count override");
    app.add_option("--gamma", opt.gamma, "target labeled fraction override");
    for (auto* sub : {&app}) sub->fallthrough();

    auto* otse = app.add_subcommand("otse", "single expansion: one new target");
    auto* mrse = app.add_subcommand("mrse", "multi-round expansion over the group layout");
    auto* grid = app.add_subcommand("grid", "strategy x seed comparison grid");
    auto* sweep = app.add_subcommand("sweep", "one-parameter sweep");
    for (auto* sub : {otse, mrse, grid, sweep}) sub->fallthrough();
    sweep->add_option("--param", opt.sweep_param, "eta, b, np or gamma")->required();
    sweep->add_option("--values", opt.sweep_values, "sweep points")->required()->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = resolve_config(opt);
        std::vector<hat::expand::RunResult> runs;
        if (otse->parsed()) {
            for (int s = 0; s < cfg.seeds; ++s) {
                runs.push_back(hat::expand::run_otse(cfg, hat::expand::strategy_by_name(cfg.strategy),
                                                     opt.seed + static_cast<std::uint64_t>(s)));
            }
        } else if (mrse->parsed()) {
            for (int s = 0; s < cfg.seeds; ++s) {
                runs.push_back(hat::expand::run_mrse(cfg, hat::expand::strategy_by_name(cfg.strategy),
                                                     opt.seed + static_cast<std::uint64_t>(s)));
            }
        } else if (grid->parsed()) {
            auto names = opt.strategies.empty() ? hat::expand::known_strategies() : opt.strategies;
            runs = hat::expand::run_grid(cfg, names, opt.seed);
        } else {
            std::string name = opt.strategies.empty() ? cfg.strategy : opt.strategies.front();
            runs = hat::expand::run_sweep(cfg, opt.sweep_param, opt.sweep_values, name, opt.seed);
        }
        hat::expand::write_outputs(runs, cfg, opt.out_dir);
        std::fputs(hat::expand::comparison_csv(runs).c_str(), stdout);
        std::fprintf(stdout, "wrote %zu run(s) to %s\n", runs.size(), opt.out_dir.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
