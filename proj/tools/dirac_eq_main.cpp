#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "dirac/experiments.hpp"
#include "dirac/propagator.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool dump_fields = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts)
{
    cmd->add_option("--config", opts.config_path, "experiment config file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", opts.seed, "seed override")->each([&](const std::string&) {
        opts.seed_set = true;
    });
    cmd->add_option("--threads", opts.threads, "worker threads (overrides config)");
    cmd->add_flag("--dump-fields", opts.dump_fields, "write binary field dumps");
}

int run(dirac::ExperimentKind kind, const CommonOpts& opts)
{
    dirac::ExperimentConfig cfg;
    try {
        cfg = dirac::ExperimentConfig::parse_file(opts.config_path);
        // the config's experiment line must agree with the subcommand; a
        // mismatch is treated as a typo rather than silently reinterpreted
        if (cfg.experiment != kind)
            throw dirac::ConfigError("config sets experiment = " +
                                     dirac::to_string(cfg.experiment) +
                                     " but the subcommand is " + dirac::to_string(kind));
        if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
        if (opts.seed_set) cfg.sampler.seed = opts.seed;
        if (opts.threads > 0) cfg.threads = opts.threads;
        if (opts.dump_fields) cfg.dump_fields = true;
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        auto start = std::chrono::steady_clock::now();
        dirac::ExperimentOutput out = dirac::run_experiment(cfg);
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();

        if (cfg.dump_fields &&
            (kind == dirac::ExperimentKind::ensemble || kind == dirac::ExperimentKind::rooms)) {
            std::filesystem::create_directories(cfg.out_dir);
            dirac::Sampler sampler(cfg.sampler);
            dirac::dump_field(sampler.sample(0),
                              (std::filesystem::path(cfg.out_dir) / "sample0.field").string());
        }
        if (cfg.dump_fields && kind == dirac::ExperimentKind::decay) {
            std::filesystem::create_directories(cfg.out_dir);
            dirac::Propagator prop(cfg.grid, cfg.mass);
            dirac::TestFunction phi = dirac::make_bump(cfg.grid, cfg.phi.bump);
            dirac::dump_field(
                prop.adjoint_evolve(phi, cfg.decay_times.back()),
                (std::filesystem::path(cfg.out_dir) / "decayed.field").string());
        }
        return dirac::emit_report(cfg, out, std::cout, wall);
    } catch (const dirac::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spectral Dirac evolution with random initial data: batch experiments"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::map<std::string, dirac::ExperimentKind> kinds = {
        {"verify", dirac::ExperimentKind::verify},
        {"covariance", dirac::ExperimentKind::covariance},
        {"ensemble", dirac::ExperimentKind::ensemble},
        {"rooms", dirac::ExperimentKind::rooms},
        {"decay", dirac::ExperimentKind::decay},
    };
    static const std::map<std::string, std::string> blurbs = {
        {"verify", "algebra, propagator and equilibrium fixed-point invariants"},
        {"covariance", "position-space covariance convergence to equilibrium"},
        {"ensemble", "Monte Carlo projections: Gaussianization and characteristic functional"},
        {"rooms", "room-corridor decomposition variance scaling"},
        {"decay", "dispersive sup-norm decay of evolved test functions"},
    };
    for (auto& [name, kind] : kinds) add_common(app.add_subcommand(name, blurbs.at(name)), opts);

    CLI11_PARSE(app, argc, argv);
    for (auto& [name, kind] : kinds)
        if (app.get_subcommand(name)->parsed()) return run(kind, opts);
    return 2;
}
