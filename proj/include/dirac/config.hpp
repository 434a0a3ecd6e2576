#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dirac/fields.hpp"
#include "dirac/samplers.hpp"

namespace dirac {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ExperimentKind { verify, covariance, ensemble, rooms, decay };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

struct PhiSpec {
    BumpSpec bump;
    bool normalize_variance = false;  // rescale so Q0(phi, phi) = 1
};

// Flat sectioned key = value format; unknown sections or keys are errors.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::verify;

    GridSpec grid{64, 64.0};
    double mass = 1.0;
    SamplerSpec sampler;
    PhiSpec phi;

    // [ensemble]
    std::vector<double> ensemble_times{0.0, 24.0};
    int ensemble_samples = 10000;
    std::vector<double> lambdas{0.5, 1.0, 2.0};
    int spot_checks = 10;
    bool sampler_suite = false;  // also run the sampler statistics checks

    // [covariance]
    std::vector<double> covariance_times{2, 2.83, 4, 5.66, 8, 11.31, 16, 20};
    std::vector<Eigen::Vector3i> probes;

    // [rooms]
    std::vector<double> rooms_times{4, 8, 16, 24};
    double rooms_delta = 0.75;
    int rooms_samples = 2000;

    // [decay]
    std::vector<double> decay_times{8, 11.31, 16, 22.63, 32, 45.25};
    std::vector<double> decay_masses{1.0, 2.0};

    // [verify]
    int verify_random_k = 1000;
    double verify_seminorm_radius = 10.0;
    std::vector<double> fixed_point_times{1.0, 10.0, 100.0};
    std::vector<double> average_windows{25.0, 50.0, 100.0};

    // runtime options (CLI-overridable)
    std::string out_dir = "out";
    int threads = 1;
    bool dump_fields = false;

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse(const std::string& text);
    std::string serialize() const;
    void validate() const;  // throws ConfigError on any violated precondition

    bool operator==(const ExperimentConfig& o) const;
};

}  // namespace dirac
