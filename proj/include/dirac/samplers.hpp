#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dirac/fields.hpp"

namespace dirac {

// Matrix-valued spectral covariance k -> q0_hat(k), Hermitian PSD at every
// mode, with q0_hat(-k) = conj q0_hat(k) so the position-space covariance is
// real. corr_range is the position-space correlation range (infinity when
// not compactly correlated).
struct CovarianceSymbol {
    std::function<Mat8c(const Vec3&)> eval;
    std::function<Vec8d(const Vec3&)> eval_diag;  // set iff diagonal
    bool diagonal = false;
    double corr_range = std::numeric_limits<double>::infinity();
};

CovarianceSymbol identity_symbol(double scale = 1.0);
// exp(-|k|^2 / (2 kappa^2)) * diag(weights); isotropic when all weights equal.
CovarianceSymbol gaussian_bump_symbol(double kappa, double scale = 1.0);
CovarianceSymbol gaussian_bump_symbol(double kappa, const Vec8d& weights);

// Mean charge density e0 = (2 pi)^-3 integral of tr q0_hat over the k-grid
// = tr q0(0).
double mean_charge_density(const CovarianceSymbol& sym, const GridSpec& grid);

// Smallest symbol eigenvalue over the whole k-grid (PSD scan); the location
// of the minimum is reported through *argmin_k when non-null.
double min_symbol_eigenvalue(const CovarianceSymbol& sym, const GridSpec& grid,
                             Vec3* argmin_k = nullptr);

enum class SamplerKind { gaussian_spectral, finite_range_moving_average };
enum class SymbolFamily { identity, gaussian_bump };

struct SamplerSpec {
    SamplerKind kind = SamplerKind::gaussian_spectral;
    GridSpec grid;
    std::uint64_t seed = 1;

    // gaussian_spectral parameters
    SymbolFamily family = SymbolFamily::gaussian_bump;
    double kappa = 1.0;
    double scale = 1.0;
    Vec8d weights = Vec8d::Ones();  // per-component diagonal weights

    // finite_range_moving_average parameters: scalar C^1 bump kernel
    // amp * (1 - (r/r_a)^2)^2 times the identity, i.i.d. +-1 noise.
    double kernel_radius = 3.0;
    double kernel_amplitude = 0.0;  // 0 = normalize to unit site variance
};

// Draws are pure functions of (spec, sample_index): members of an ensemble
// can be generated in any order and in parallel.
class Sampler {
public:
    explicit Sampler(const SamplerSpec& spec);

    const SamplerSpec& spec() const { return spec_; }
    RealField8 sample(std::uint64_t index) const;

    // Closed-form covariance of the field this sampler produces.
    CovarianceSymbol exact_covariance() const;

    // Correlation range: 2 r_a for the moving average (independence beyond),
    // effective range of q0 for the spectral Gaussian.
    double correlation_range() const;

    // --- moving-average noise view ------------------------------------
    // A moving-average field is kernel * xi with xi the i.i.d. sign field,
    // so <psi0, g> = sum xi . weights with weights = h^3 (kernel x-corr g).
    bool has_noise_pullback() const
    {
        return spec_.kind == SamplerKind::finite_range_moving_average;
    }
    RealField8 noise_pullback(const RealField8& g) const;
    // One pass over the index-th sign field, accumulating all requested
    // projections simultaneously.
    std::vector<double> project_noise(std::uint64_t index,
                                      const std::vector<const RealField8*>& weights) const;

private:
    RealField8 sample_gaussian(std::uint64_t index) const;
    RealField8 sample_moving_average(std::uint64_t index) const;

    SamplerSpec spec_;
    CovarianceSymbol symbol_;              // gaussian_spectral input symbol
    std::vector<double> kernel_spectrum_;  // raw DFT of the kernel (real)
    double kernel_amp_ = 1.0;
};

// Empirical covariance at a list of lattice offsets, averaged over samples
// and over all base points. Offsets are stored canonically; querying the
// negated offset returns the transpose, which makes the estimator symmetry
// exact by construction.
class CovarianceEstimate {
public:
    Mat8d value(const Eigen::Vector3i& offset) const;
    Mat8d standard_error(const Eigen::Vector3i& offset) const;
    int sample_count() const { return samples_; }

    // grand mean of each component over samples, with standard errors
    Vec8d component_mean() const { return comp_mean_; }
    Vec8d component_mean_se() const { return comp_mean_se_; }

private:
    friend class CovarianceAccumulator;
    int find(const Eigen::Vector3i& offset, bool& transposed) const;

    std::vector<Eigen::Vector3i> offsets_;
    std::vector<Mat8d> mean_;
    std::vector<Mat8d> se_;
    Vec8d comp_mean_ = Vec8d::Zero();
    Vec8d comp_mean_se_ = Vec8d::Zero();
    int samples_ = 0;
};

// Streaming builder for CovarianceEstimate: fields are folded in one at a
// time, so an ensemble never has to be held in memory.
class CovarianceAccumulator {
public:
    CovarianceAccumulator(const GridSpec& grid, const std::vector<Eigen::Vector3i>& offsets);
    void add(const RealField8& field);
    CovarianceEstimate finalize() const;  // needs >= 2 samples

private:
    GridSpec grid_;
    std::vector<Eigen::Vector3i> offsets_;
    std::vector<Mat8d> sum_, sumsq_;
    Vec8d mean_sum_ = Vec8d::Zero(), mean_sumsq_ = Vec8d::Zero();
    int samples_ = 0;
};

// Convenience wrapper over the accumulator.
CovarianceEstimate empirical_covariance(const std::vector<RealField8>& samples,
                                        const std::vector<Eigen::Vector3i>& offsets);

std::string to_string(SamplerKind k);
std::string to_string(SymbolFamily f);
SamplerKind sampler_kind_from_string(const std::string& s);
SymbolFamily symbol_family_from_string(const std::string& s);

}  // namespace dirac
