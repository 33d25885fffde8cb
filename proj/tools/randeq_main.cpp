// randeq -- CLI for equilibrium-state experiments on random expanding
// circle maps.
//
//   randeq <check|equilibrium|pressure|gibbs|decay|stability|all>
//          --config PATH [--seed U64] [--out DIR] [--threads N]
//          [--override-hypotheses] [--grid N]
//
// Exit codes: 0 success, 1 internal error, 2 hypothesis failure,
// 3 config error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "randeq/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw randeq::ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"randeq: equilibrium states for random non-uniformly expanding circle maps"};
    app.fallthrough();

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir;
    int threads = 0;
    int grid = 0;
    bool override_hyp = false;

    app.add_option("--config", config_path, "experiment config (key-value text or JSON)")
        ->required();
    app.add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
        seed_given = true;
    });
    app.add_option("--out", out_dir, "output root directory (default: config experiment.out)");
    app.add_option("--threads", threads, "worker cap (default: config experiment.threads)");
    app.add_option("--grid", grid, "override numerics.grid");
    app.add_flag("--override-hypotheses", override_hyp,
                 "run equilibrium stages even when the hypothesis checker fails");

    static const char* subs[] = {"check", "equilibrium", "pressure",
                                 "gibbs", "decay", "stability", "all"};
    for (const char* s : subs) app.add_subcommand(s);
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? randeq::kExitOk : randeq::kExitConfig;
    }

    randeq::ExperimentConfig cfg;
    try {
        cfg = randeq::parse_config(read_file(config_path));
        if (seed_given) cfg.seed = seed;
        if (threads > 0) cfg.threads = threads;
        if (grid > 0) {
            cfg.grid = grid;
            cfg.validate();
        }
    } catch (const randeq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return randeq::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return randeq::kExitConfig;
    }

    std::string sub = app.get_subcommands().front()->get_name();
    try {
        randeq::Runner runner(cfg, override_hyp, out_dir);
        std::cout << "run directory: " << runner.dir().string() << "\n";
        const auto& hyp = runner.hypotheses();
        std::cout << "hypotheses: " << (hyp.all_pass() ? "pass" : "FAIL")
                  << "  gamma=" << randeq::fmt17(hyp.gamma)
                  << "  c=" << randeq::fmt17(hyp.c) << "\n";
        int rc = randeq::kExitInternal;
        if (sub == "check") rc = runner.cmd_check();
        else if (sub == "equilibrium") rc = runner.cmd_equilibrium();
        else if (sub == "pressure") rc = runner.cmd_pressure();
        else if (sub == "gibbs") rc = runner.cmd_gibbs();
        else if (sub == "decay") rc = runner.cmd_decay();
        else if (sub == "stability") rc = runner.cmd_stability();
        else if (sub == "all") rc = runner.cmd_all();
        if (rc == randeq::kExitHypotheses)
            std::cerr << "hypotheses failed; rerun with --override-hypotheses to force\n";
        return rc;
    } catch (const randeq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return randeq::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return randeq::kExitInternal;
    }
}
