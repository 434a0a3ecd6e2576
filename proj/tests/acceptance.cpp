// Acceptance suite: one criterion per block, each with pinned parameters,
// tolerances and a wall-clock budget. Prints one line per criterion plus the
// individual checks; exits nonzero if anything failed.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "dirac/experiments.hpp"

using namespace dirac;

namespace {

struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<Check> checks;
    double seconds = 0.0;
    double budget_seconds = 0.0;

    bool pass() const
    {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return seconds <= budget_seconds;
    }
};

ExperimentConfig verify_config()
{
    ExperimentConfig c;
    c.experiment = ExperimentKind::verify;
    c.grid = GridSpec(64, 64.0);
    c.mass = 1.0;
    c.sampler.grid = c.grid;
    c.sampler.kind = SamplerKind::gaussian_spectral;
    c.sampler.family = SymbolFamily::gaussian_bump;
    c.sampler.kappa = 1.0;
    c.sampler.seed = 12345;
    c.sampler.weights << 2, 1, 1, 1, 1, 1, 1, 2;  // generic non-equilibrium input
    c.verify_random_k = 1000;
    c.verify_seminorm_radius = 10.0;
    c.fixed_point_times = {1.0, 10.0, 100.0};
    c.average_windows = {25.0, 50.0, 100.0};
    return c;
}

CriterionResult run_criterion_1()
{
    CriterionResult r{1, "Dirac and Lambda algebra, symbol identities", {}, 0, 1.0};
    verify_algebra_checks(verify_config(), r.checks);
    return r;
}

CriterionResult run_criterion_2()
{
    CriterionResult r{2, "propagator: unitarity, group law, duality, finite speed", {}, 0, 60.0};
    verify_propagator_checks(verify_config(), r.checks);
    return r;
}

CriterionResult run_criterion_3()
{
    CriterionResult r{3, "equilibrium covariance fixed point and time average", {}, 0, 60.0};
    verify_equilibrium_checks(verify_config(), r.checks);
    return r;
}

CriterionResult run_criterion_4()
{
    CriterionResult r{4, "position-space covariance convergence", {}, 0, 120.0};
    ExperimentConfig c;
    c.experiment = ExperimentKind::covariance;
    c.grid = GridSpec(64, 64.0);
    c.mass = 1.0;
    c.sampler.grid = c.grid;
    c.sampler.kind = SamplerKind::gaussian_spectral;
    c.sampler.family = SymbolFamily::gaussian_bump;
    c.sampler.kappa = 1.0;
    c.sampler.seed = 12345;
    c.sampler.weights << 2, 1, 1, 1, 1, 1, 1, 2;
    c.covariance_times = {2.0, 2.83, 4.0, 5.66, 8.0, 11.31, 16.0, 20.0};
    c.probes = {{0, 0, 0}, {1, 0, 0}, {2, 1, 0}, {3, 0, 0}, {0, 2, 2}, {4, 2, 1}};
    c.validate();
    r.checks = run_covariance_experiment(c).checks;
    return r;
}

ExperimentConfig clt_config()
{
    ExperimentConfig c;
    c.experiment = ExperimentKind::ensemble;
    c.grid = GridSpec(64, 64.0);
    c.mass = 1.0;
    c.sampler.grid = c.grid;
    c.sampler.kind = SamplerKind::finite_range_moving_average;
    c.sampler.kernel_radius = 1.5;
    c.sampler.seed = 20240801;
    c.phi.bump = {BumpKind::smooth, 1.2, 1.0, 0, 1.0};
    c.phi.normalize_variance = true;
    c.ensemble_times = {0.0, 24.0};
    c.ensemble_samples = 10000;
    c.lambdas = {0.5, 1.0, 2.0};
    c.spot_checks = 10;
    return c;
}

CriterionResult run_criterion_5()
{
    CriterionResult r{5, "central limit: projections Gaussianize, characteristic functional",
                      {}, 0, 1200.0};
    ExperimentConfig c = clt_config();
    c.validate();
    r.checks = run_ensemble_experiment(c).checks;
    return r;
}

CriterionResult run_criterion_6()
{
    CriterionResult r{6, "room-corridor decomposition and variance scaling", {}, 0, 900.0};
    ExperimentConfig c;
    c.experiment = ExperimentKind::rooms;
    c.grid = GridSpec(64, 64.0);
    c.mass = 1.0;
    c.sampler.grid = c.grid;
    c.sampler.kind = SamplerKind::finite_range_moving_average;
    c.sampler.kernel_radius = 1.5;
    c.sampler.seed = 777;
    c.phi.bump = {BumpKind::gauss_taper, 4.5, 1.2, 0, 1.0};
    c.rooms_times = {4.0, 8.0, 16.0, 24.0};
    c.rooms_delta = 0.75;
    c.rooms_samples = 2000;
    c.validate();
    r.checks = run_rooms_experiment(c).checks;
    return r;
}

CriterionResult run_criterion_7()
{
    CriterionResult r{7, "dispersive sup-norm decay exponent", {}, 0, 600.0};
    ExperimentConfig c;
    c.experiment = ExperimentKind::decay;
    c.grid = GridSpec(128, 128.0);
    c.mass = 1.0;
    c.sampler.grid = c.grid;
    c.phi.bump = {BumpKind::smooth, 4.0, 1.0, 0, 1.0};
    c.decay_times = {8.0, 11.31, 16.0, 22.63, 32.0, 45.25};
    c.decay_masses = {1.0, 2.0};
    c.validate();
    r.checks = run_decay_experiment(c).checks;
    return r;
}

CriterionResult run_criterion_8()
{
    CriterionResult r{8, "sampler statistics: mean, covariance, mixing range, determinism",
                      {}, 0, 300.0};
    ExperimentConfig c;
    c.experiment = ExperimentKind::ensemble;
    c.grid = GridSpec(32, 32.0);
    c.mass = 1.0;
    c.sampler.grid = c.grid;
    c.sampler.kind = SamplerKind::gaussian_spectral;
    c.sampler.family = SymbolFamily::gaussian_bump;
    c.sampler.kappa = 1.0;
    c.sampler.kernel_radius = 3.0;
    c.sampler.seed = 424242;
    c.ensemble_samples = 2000;
    r.checks = run_sampler_suite(c).checks;
    return r;
}

CriterionResult run_criterion(int id)
{
    using Runner = CriterionResult (*)();
    static const Runner runners[8] = {run_criterion_1, run_criterion_2, run_criterion_3,
                                      run_criterion_4, run_criterion_5, run_criterion_6,
                                      run_criterion_7, run_criterion_8};
    auto start = std::chrono::steady_clock::now();
    CriterionResult r = runners[id - 1]();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            wanted.push_back(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
            return 2;
        }
    }
    if (wanted.empty())
        for (int i = 1; i <= 8; ++i) wanted.push_back(i);

    bool all_pass = true;
    for (int id : wanted) {
        if (id < 1 || id > 8) {
            std::fprintf(stderr, "criterion id out of range: %d\n", id);
            return 2;
        }
        CriterionResult r = run_criterion(id);
        bool checks_pass = true;
        for (const auto& c : r.checks) checks_pass = checks_pass && c.pass;
        bool within_budget = r.seconds <= r.budget_seconds;
        bool pass = checks_pass && within_budget;
        all_pass = all_pass && pass;

        std::printf("[%d] %-58s %s  (%zu checks, %.1f s, budget %.0f s)\n", r.id,
                    r.name.c_str(), pass ? "PASS" : "FAIL", r.checks.size(), r.seconds,
                    r.budget_seconds);
        for (const auto& c : r.checks)
            std::printf("      [%s] %s  (%s)\n", c.pass ? "pass" : "FAIL", c.name.c_str(),
                        c.detail.c_str());
        if (!within_budget)
            std::printf("      [FAIL] runtime  (%.1f s exceeds the %.0f s budget)\n", r.seconds,
                        r.budget_seconds);
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
