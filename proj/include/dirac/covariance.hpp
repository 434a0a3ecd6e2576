#pragma once

#include "dirac/clifford.hpp"
#include "dirac/fft.hpp"
#include "dirac/samplers.hpp"

namespace dirac {

using SymbolFn = std::function<Mat8c(const Vec3&)>;

// Covariance symbol of the evolved measure: G_t(k) q0_hat(k) G_t(k)^dagger.
Mat8c q_hat_t(const RealSymbols& sym, const Vec3& k, double t, const CovarianceSymbol& q0);

// Same quantity through the half-angle expansion
//   (1+cos 2wt)/2 q0 - sin 2wt/(2w) (q0 P^T(ik) + P(-ik) q0)
//   + (1-cos 2wt)/(2w^2) P(-ik) q0 P^T(ik),
// kept as an independent evaluation route.
Mat8c q_hat_t_expanded(const RealSymbols& sym, const Vec3& k, double t,
                       const CovarianceSymbol& q0);

// Equilibrium symbol: q0/2 + P(-ik) q0 P^T(ik) / (2 (k^2 + m^2)).
Mat8c q_hat_inf(const RealSymbols& sym, const Vec3& k, const CovarianceSymbol& q0);

SymbolFn q_t_fn(const RealSymbols& sym, const CovarianceSymbol& q0, double t);
SymbolFn q_inf_fn(const RealSymbols& sym, const CovarianceSymbol& q0);

// (1/T) integral over [0,T] of q_hat_t, composite Simpson with the given
// even number of steps.
Mat8c time_average_q_hat(const RealSymbols& sym, const Vec3& k, const CovarianceSymbol& q0,
                         double T, int steps);

// Position-space covariance at lattice offsets: (1/L^3) sum_k e^{-ik.z} f(k).
// The result must be real; the largest imaginary residue found is reported
// through *imag_residue when non-null. Covariances of evolved fields live on
// the band-resolved mode set (the propagator drops the partnerless Nyquist
// planes), selected with skip_nyquist; static sampler covariances use the
// full grid.
std::vector<Mat8d> position_table(const SymbolFn& f, const GridSpec& grid,
                                  const std::vector<Eigen::Vector3i>& offsets,
                                  double* imag_residue = nullptr, bool skip_nyquist = false);

std::vector<Mat8d> q_position(const CovarianceSymbol& sym, const GridSpec& grid,
                              const std::vector<Eigen::Vector3i>& offsets,
                              double* imag_residue = nullptr);

// Equilibrium covariance in position space through the Yukawa-convolution
// representation: q0/2 plus the convolution of e^{-m|z|}/(4 pi |z|) (sampled
// on the grid, origin cell omitted) with the P-sandwiched covariance. A
// cross-check route; agrees with the spectral route to about a percent.
std::vector<Mat8d> q_inf_position_yukawa(const RealSymbols& sym, const CovarianceSymbol& q0,
                                         const GridSpec& grid,
                                         const std::vector<Eigen::Vector3i>& offsets);

// |q_t(z) - q_inf(z)| (max over matrix entries) tabulated over probes and
// times, all in one sweep over the k-grid.
struct ConvergenceProfile {
    std::vector<double> times;
    std::vector<Eigen::Vector3i> probes;
    // err[ti][pi]: deviation at time ti, probe pi; max_err[ti] over probes
    std::vector<std::vector<double>> err;
    std::vector<double> max_err;
};
ConvergenceProfile convergence_profile(const RealSymbols& sym, const CovarianceSymbol& q0,
                                       const GridSpec& grid,
                                       const std::vector<Eigen::Vector3i>& probes,
                                       const std::vector<double>& times);

// Q(phi, phi) = (1/L^3) sum_k (R phi-hat)^dagger q_hat(k) (R phi-hat), i.e.
// the variance of <psi, phi> under the measure with spectral covariance q_hat.
// skip_nyquist restricts the sum to the band-resolved mode set.
double quadratic_form(const RealField8& phi, const SymbolFn& q_hat, bool skip_nyquist = false);
double quadratic_form(const TestFunction& phi, const SymbolFn& q_hat, bool skip_nyquist = false);
double quadratic_form_spectral(const SpectralField8& phi_hat, const SymbolFn& q_hat,
                               bool skip_nyquist = false);

// Equilibrium measure data: the limit covariance symbol together with its
// quadratic form over test functions.
struct EquilibriumForm {
    CovarianceSymbol q_inf;
    GridSpec grid;
    double quadratic(const TestFunction& phi) const { return quadratic_form(phi, q_inf.eval); }
};
EquilibriumForm make_equilibrium_form(const RealSymbols& sym, const CovarianceSymbol& q0,
                                      const GridSpec& grid);

}  // namespace dirac
