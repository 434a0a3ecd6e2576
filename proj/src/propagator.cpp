#include "dirac/propagator.hpp"

#include <cmath>
#include <stdexcept>

#include "dirac/fft.hpp"

namespace dirac {

void Propagator::apply_symbol(SpectralField8& spec, double t, bool adjoint) const
{
    if (t == 0.0) return;  // exact identity, Nyquist planes included
    const GridSpec& g = spec.grid;
    const std::size_t sz = g.size();
    const int ny = g.n / 2;
    Vec8c v;
    for (int iz = 0; iz < g.n; ++iz)
        for (int iy = 0; iy < g.n; ++iy) {
            const double ky = g.wavenumber(iy), kz = g.wavenumber(iz);
            const bool ny_line = iy == ny || iz == ny;
            for (int ix = 0; ix < g.n; ++ix) {
                const std::size_t node = g.linear(ix, iy, iz);
                // Nyquist planes have no negation partner on the grid; the
                // complex symbol cannot act on them without breaking realness,
                // so the dynamics is band-resolved: those modes are dropped.
                if (ny_line || ix == ny) {
                    for (int c = 0; c < 8; ++c) spec.data[c * sz + node] = cplx(0, 0);
                    continue;
                }
                const Vec3 k(g.wavenumber(ix), ky, kz);
                for (int c = 0; c < 8; ++c) v[c] = spec.data[c * sz + node];
                Vec8c w = adjoint ? sym_.apply_adjoint_propagator(k, t, v)
                                  : sym_.apply_propagator(k, t, v);
                for (int c = 0; c < 8; ++c) spec.data[c * sz + node] = w[c];
            }
        }
}

RealField8 Propagator::evolve(const RealField8& f0, double t) const
{
    if (!(f0.grid == grid_)) throw std::invalid_argument("evolve: grid mismatch");
    SpectralField8 spec = fft_forward(f0);
    apply_symbol(spec, t, /*adjoint=*/false);
    RealField8 out = fft_inverse(spec);
    if (f0.support_radius_hint >= 0.0) {
        out.support_radius_hint = f0.support_radius_hint + std::abs(t);
        out.wrap_flagged = f0.wrap_flagged || out.support_radius_hint >= 0.5 * grid_.length;
    } else {
        out.wrap_flagged = f0.wrap_flagged;
    }
    return out;
}

SpinorField Propagator::evolve(const SpinorField& psi0, double t) const
{
    RealField8 out = evolve(realify(psi0), t);
    return complexify(out);
}

SpinorField Propagator::evolve_complex4(const SpinorField& psi0, double t) const
{
    if (!(psi0.grid == grid_)) throw std::invalid_argument("evolve: grid mismatch");
    std::vector<cplx> spec = fft_forward_spinor(psi0);
    const GridSpec& g = grid_;
    const std::size_t sz = g.size();
    const int ny = g.n / 2;
    Vec4c v;
    for (int iz = 0; iz < g.n; ++iz)
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix) {
                const std::size_t node = g.linear(ix, iy, iz);
                if (t != 0.0 && (ix == ny || iy == ny || iz == ny)) {
                    for (int c = 0; c < 4; ++c) spec[c * sz + node] = cplx(0, 0);
                    continue;
                }
                const Vec3 k = g.wavevector(ix, iy, iz);
                const Mat4c G = sym_.propagator_complex4(k, t);
                for (int c = 0; c < 4; ++c) v[c] = spec[c * sz + node];
                Vec4c w = G * v;
                for (int c = 0; c < 4; ++c) spec[c * sz + node] = w[c];
            }
    SpinorField out = fft_inverse_spinor(std::move(spec), g);
    out.support_radius_hint = psi0.support_radius_hint >= 0.0
                                  ? psi0.support_radius_hint + std::abs(t)
                                  : -1.0;
    return out;
}

RealField8 Propagator::adjoint_evolve(const RealField8& phi, double t) const
{
    if (!(phi.grid == grid_)) throw std::invalid_argument("adjoint_evolve: grid mismatch");
    SpectralField8 spec = fft_forward(phi);
    apply_symbol(spec, t, /*adjoint=*/true);
    RealField8 out = fft_inverse(spec);
    if (phi.support_radius_hint >= 0.0)
        out.support_radius_hint = phi.support_radius_hint + std::abs(t);
    return out;
}

RealField8 Propagator::adjoint_evolve(const TestFunction& phi, double t) const
{
    RealField8 out = adjoint_evolve(phi.field, t);
    out.support_radius_hint = phi.radius + std::abs(t);
    out.wrap_flagged = out.support_radius_hint >= 0.5 * grid_.length;
    return out;
}

SpectralField8 Propagator::adjoint_evolve_spectrum(const SpectralField8& phi_hat, double t) const
{
    SpectralField8 out = phi_hat;
    apply_symbol(out, t, /*adjoint=*/true);
    return out;
}

Propagator::LocalEstimateReport Propagator::local_estimate_check(const SpinorField& psi0,
                                                                 double t, double R) const
{
    if (!(R + std::abs(t) < 0.5 * grid_.length))
        throw std::invalid_argument("local_estimate_check: R + t must be < L/2");
    LocalEstimateReport rep;
    rep.initial_norm = local_seminorm(psi0, R + std::abs(t));
    rep.evolved_norm = local_seminorm(evolve(psi0, t), R);
    rep.ratio = rep.initial_norm > 0.0 ? rep.evolved_norm / rep.initial_norm : 0.0;
    return rep;
}

}  // namespace dirac
