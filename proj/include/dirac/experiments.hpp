#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dirac/config.hpp"

#include <json.hpp>

namespace dirac {

inline constexpr const char* kVersion = "1.0.0";

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;  // the measured quantity
    std::string detail;  // threshold and context, human readable
};

struct ExperimentOutput {
    std::vector<Check> checks;
    nlohmann::ordered_json summary;              // deterministic given (config, seed)
    std::map<std::string, std::string> tables;   // file name -> CSV payload

    bool all_pass() const
    {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

ExperimentOutput run_verify(const ExperimentConfig& cfg);
// The three sections of the verify suite, individually runnable: pure
// matrix algebra, grid evolution, and the equilibrium-covariance fixed point.
void verify_algebra_checks(const ExperimentConfig& cfg, std::vector<Check>& checks);
void verify_propagator_checks(const ExperimentConfig& cfg, std::vector<Check>& checks);
void verify_equilibrium_checks(const ExperimentConfig& cfg, std::vector<Check>& checks,
                               nlohmann::ordered_json* summary = nullptr);
ExperimentOutput run_covariance_experiment(const ExperimentConfig& cfg);
ExperimentOutput run_ensemble_experiment(const ExperimentConfig& cfg);
ExperimentOutput run_rooms_experiment(const ExperimentConfig& cfg);
ExperimentOutput run_decay_experiment(const ExperimentConfig& cfg);
ExperimentOutput run_sampler_suite(const ExperimentConfig& cfg);

ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Builds the configured test function, optionally rescaled so that the
// initial projection variance Q0(phi, phi) is exactly 1.
TestFunction build_phi(const ExperimentConfig& cfg);

// Writes summary.json, the CSV tables and manifest.json into cfg.out_dir,
// prints one line per check, and returns the process exit code (0 all checks
// pass, 1 otherwise).
int emit_report(const ExperimentConfig& cfg, const ExperimentOutput& out, std::ostream& log,
                double wall_seconds);

}  // namespace dirac
