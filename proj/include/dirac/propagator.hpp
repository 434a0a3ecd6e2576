#pragma once

#include "dirac/clifford.hpp"
#include "dirac/fields.hpp"

namespace dirac {

// One-shot spectral evolution: exact per-mode multiplication by the
// propagator symbol, no time stepping. Charge is conserved to roundoff
// and the group law holds exactly in the symbol algebra.
class Propagator {
public:
    Propagator(const GridSpec& grid, double mass) : grid_(grid), sym_(mass) {}

    const RealSymbols& symbols() const { return sym_; }
    const GridSpec& grid() const { return grid_; }

    // U(t) applied through the real 8x8 symbol route (canonical path).
    SpinorField evolve(const SpinorField& psi0, double t) const;
    RealField8 evolve(const RealField8& f0, double t) const;

    // U(t) through the complex 4x4 symbol; independent route used only to
    // cross-check the canonical path.
    SpinorField evolve_complex4(const SpinorField& psi0, double t) const;

    // Adjoint group: <U(t) psi, phi> = <psi, adjoint_evolve(phi, t)>.
    RealField8 adjoint_evolve(const RealField8& phi, double t) const;
    RealField8 adjoint_evolve(const TestFunction& phi, double t) const;

    // Spectral-side adjoint evolution for callers that hold a spectrum.
    SpectralField8 adjoint_evolve_spectrum(const SpectralField8& phi_hat, double t) const;

    struct LocalEstimateReport {
        double evolved_norm = 0.0;   // || U(t) psi0 ||_{0,R}
        double initial_norm = 0.0;   // || psi0 ||_{0,R+t}
        double ratio = 0.0;
    };
    // Compares the local charge of the evolved state on the ball of radius R
    // with the initial charge on the inflated ball of radius R + t.
    LocalEstimateReport local_estimate_check(const SpinorField& psi0, double t, double R) const;

private:
    void apply_symbol(SpectralField8& spec, double t, bool adjoint) const;

    GridSpec grid_;
    RealSymbols sym_;
};

}  // namespace dirac
