#pragma once

#include <complex>
#include <vector>

#include "dirac/covariance.hpp"
#include "dirac/propagator.hpp"
#include "dirac/samplers.hpp"
#include "dirac/statistics.hpp"

namespace dirac {

// --- Monte Carlo projections -------------------------------------------

struct EnsembleResult {
    std::vector<double> times;
    int phi_count = 0;
    int samples = 0;

    // projections[ti * phi_count + pi][sample index]
    std::vector<std::vector<double>> projections;
    std::vector<MomentSummary> summaries;  // same indexing

    // dual-route spot checks: forward evolution versus adjoint projection
    int spot_checks = 0;
    double route_mismatch = 0.0;        // max absolute difference
    double route_scale = 0.0;           // rms projection over spot samples

    const std::vector<double>& series(int ti, int pi) const
    {
        return projections[std::size_t(ti) * phi_count + pi];
    }
    const MomentSummary& summary(int ti, int pi) const
    {
        return summaries[std::size_t(ti) * phi_count + pi];
    }
};

// Projections <psi(t), phi> over an ensemble, computed through the adjoint
// route: one adjoint evolution per (t, phi), then M cheap inner products.
// The moving-average sampler additionally projects straight off its sign
// field, which avoids materializing the sample fields. spot_checks samples
// are re-done with a materialized field and a forward evolution.
EnsembleResult run_ensemble(const Propagator& prop, const Sampler& sampler,
                            const std::vector<TestFunction>& phis,
                            const std::vector<double>& times, int samples,
                            int spot_checks = 0, int threads = 1);

// Empirical characteristic function at scaled test functions, with the
// Gaussian comparison columns exp(-lambda^2 Q / 2) for Q = Q_t and Q_inf.
struct CharFnRow {
    double lambda = 0.0;
    std::complex<double> estimate;
    double se = 0.0;
    double gauss_t = 0.0;
    double gauss_inf = 0.0;
};
std::vector<CharFnRow> char_functional(const EnsembleResult& result, int ti, int pi,
                                       const std::vector<double>& lambdas, double q_form_t,
                                       double q_form_inf);

// --- Room-corridor decomposition -----------------------------------------

// Slabs along the x3 axis: rooms of width d starting at j * (d + rho),
// corridors of width rho between them. The slab family tiles the torus
// exactly, so the decomposition below reconstructs the projection to
// roundoff; slabs that miss the inflated cone |x3| <= t + rbar carry no
// signal beyond the band-limiting leakage.
struct RoomCorridorLayout {
    double t = 0.0;
    double delta = 0.25;
    double room_width = 1.0;      // d_t ~ t / ln t
    double corridor_width = 1.0;  // rho_t ~ t^{1-delta}
    double slab_period = 2.0;     // h_t = d_t + rho_t
    int j_min = 0, j_max = 0;     // slabs covering the torus
    double support_halfwidth = 0.0;  // t + rbar

    static RoomCorridorLayout build(const GridSpec& grid, double t, double delta, double rbar,
                                    bool round_to_grid = false);

    int slab_of(double x3) const;             // index j with x3 in [j h, (j+1) h)
    bool is_room(double x3) const;            // within the room part of its slab
    bool intersects_support(int j) const;     // slab j meets [-t-rbar, t+rbar]
    int room_count() const { return j_max - j_min + 1; }
};

struct RoomCorridorTerms {
    RoomCorridorLayout layout;
    std::vector<double> rooms;      // r_t^j, j = layout.j_min .. j_max
    std::vector<double> corridors;  // c_t^j
    double projection = 0.0;        // independent full inner product
    double sum() const;
};

// Decomposes <U(t) psi0, phi> = sum_j (r_t^j + c_t^j) with
// r_t^j = <psi0, chi_room^j U'(t) phi>.
RoomCorridorTerms room_corridor_decompose(const Propagator& prop, const RealField8& psi0,
                                          const TestFunction& phi, double t, double delta,
                                          bool round_to_grid = false);

// Ensemble second moments of the room/corridor terms over a time grid,
// against the d_t/t and rho_t/t envelopes.
struct VarianceScalingRow {
    double t = 0.0;
    RoomCorridorLayout layout;
    double max_room_var = 0.0;      // max_j E |r_t^j|^2
    double max_corridor_var = 0.0;  // max_j E |c_t^j|^2
    double room_ratio = 0.0;        // max_room_var * t / d_t
    double corridor_ratio = 0.0;    // max_corridor_var * t / rho_t
    double reconstruction_error = 0.0;  // max over samples, relative
    double out_of_support = 0.0;        // max |term| outside the cone window, relative
};
std::vector<VarianceScalingRow> variance_scaling_report(const Propagator& prop,
                                                        const Sampler& sampler,
                                                        const TestFunction& phi,
                                                        const std::vector<double>& t_grid,
                                                        double delta, int samples,
                                                        int threads = 1,
                                                        bool round_to_grid = false);

// --- Dispersive decay ----------------------------------------------------

struct DecayProbe {
    std::vector<double> times;
    std::vector<double> sup_norms;  // sup_x |U'(t) phi (x)|
    PowerLawFit fit;                // sup ~ t^exponent
};
DecayProbe decay_probe(const Propagator& prop, const TestFunction& phi,
                       const std::vector<double>& t_grid);

}  // namespace dirac
