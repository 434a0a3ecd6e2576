#include "dirac/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace dirac {

Mat8c q_hat_t(const RealSymbols& sym, const Vec3& k, double t, const CovarianceSymbol& q0)
{
    Mat8c G = sym.propagator(k, t);
    return Mat8c(G * q0.eval(k) * G.adjoint());
}

Mat8c q_hat_t_expanded(const RealSymbols& sym, const Vec3& k, double t,
                       const CovarianceSymbol& q0)
{
    const double w = sym.dispersion(k);
    const double c2 = std::cos(2.0 * w * t), s2 = std::sin(2.0 * w * t);
    const Mat8c P = sym.symbol_p(k);
    const Mat8c Ptik = Mat8c(-P);  // P^T(ik) = -P(-ik)
    const Mat8c Q = q0.eval(k);
    return Mat8c(0.5 * (1.0 + c2) * Q - (s2 / (2.0 * w)) * (Q * Ptik + P * Q) +
                 ((1.0 - c2) / (2.0 * w * w)) * (P * Q * Ptik));
}

Mat8c q_hat_inf(const RealSymbols& sym, const Vec3& k, const CovarianceSymbol& q0)
{
    const double w2 = k.squaredNorm() + sym.mass() * sym.mass();
    const Mat8c P = sym.symbol_p(k);
    const Mat8c Q = q0.eval(k);
    return Mat8c(0.5 * Q + (0.5 / w2) * (P * Q * Mat8c(-P)));
}

SymbolFn q_t_fn(const RealSymbols& sym, const CovarianceSymbol& q0, double t)
{
    return [&sym, q0, t](const Vec3& k) { return q_hat_t(sym, k, t, q0); };
}

SymbolFn q_inf_fn(const RealSymbols& sym, const CovarianceSymbol& q0)
{
    return [&sym, q0](const Vec3& k) { return q_hat_inf(sym, k, q0); };
}

Mat8c time_average_q_hat(const RealSymbols& sym, const Vec3& k, const CovarianceSymbol& q0,
                         double T, int steps)
{
    if (steps < 2 || steps % 2 != 0)
        throw std::invalid_argument("time_average_q_hat: steps must be even and >= 2");
    const double dt = T / steps;
    Mat8c acc = Mat8c::Zero();
    for (int i = 0; i <= steps; ++i) {
        double wgt = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += wgt * q_hat_t(sym, k, i * dt, q0);
    }
    return Mat8c(acc * (dt / 3.0 / T));
}

std::vector<Mat8d> position_table(const SymbolFn& f, const GridSpec& grid,
                                  const std::vector<Eigen::Vector3i>& offsets,
                                  double* imag_residue, bool skip_nyquist)
{
    const int ny = grid.n / 2;
    std::vector<Mat8c> acc(offsets.size(), Mat8c::Zero());
    for (int iz = 0; iz < grid.n; ++iz)
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) {
                if (skip_nyquist && (ix == ny || iy == ny || iz == ny)) continue;
                const Vec3 k = grid.wavevector(ix, iy, iz);
                const Mat8c q = f(k);
                for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
                    const Vec3 z = grid.h() * offsets[oi].cast<double>();
                    const double ph = -k.dot(z);
                    acc[oi] += cplx(std::cos(ph), std::sin(ph)) * q;
                }
            }
    const double invL3 = 1.0 / (grid.length * grid.length * grid.length);
    double res = 0.0;
    std::vector<Mat8d> out(offsets.size());
    for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
        acc[oi] *= invL3;
        res = std::max(res, acc[oi].imag().cwiseAbs().maxCoeff());
        out[oi] = acc[oi].real();
    }
    if (imag_residue) *imag_residue = res;
    return out;
}

std::vector<Mat8d> q_position(const CovarianceSymbol& sym, const GridSpec& grid,
                              const std::vector<Eigen::Vector3i>& offsets,
                              double* imag_residue)
{
    return position_table(sym.eval, grid, offsets, imag_residue);
}

std::vector<Mat8d> q_inf_position_yukawa(const RealSymbols& sym, const CovarianceSymbol& q0,
                                         const GridSpec& grid,
                                         const std::vector<Eigen::Vector3i>& offsets)
{
    // raw spectrum of the sampled Yukawa kernel, origin cell omitted
    std::vector<cplx> yukawa(grid.size(), cplx(0, 0));
    const double m = sym.mass();
    for (int iz = 0; iz < grid.n; ++iz)
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) {
                double r = grid.node_radius(ix, iy, iz);
                if (r == 0.0) continue;
                yukawa[grid.linear(ix, iy, iz)] =
                    std::exp(-m * r) / (4.0 * 3.141592653589793238462643383 * r);
            }
    fft3_forward(yukawa, grid);

    const double h3 = grid.h() * grid.h() * grid.h();
    SymbolFn f = [&, h3](const Vec3& k) -> Mat8c {
        // map k back to axis indices to pick the sampled-kernel transform
        auto axis_index = [&](double kv) {
            int mm = int(std::llround(kv * grid.length / 6.283185307179586476925286766559));
            return (mm % grid.n + grid.n) % grid.n;
        };
        const int ix = axis_index(k[0]);
        const int iy = axis_index(k[1]);
        const int iz = axis_index(k[2]);
        const cplx phat = h3 * yukawa[grid.linear(ix, iy, iz)];
        const Mat8c P = sym.symbol_p(k);
        const Mat8c Q = q0.eval(k);
        return Mat8c(0.5 * Q + 0.5 * phat * (P * Q * Mat8c(-P)));
    };
    return position_table(f, grid, offsets, nullptr, /*skip_nyquist=*/true);
}

ConvergenceProfile convergence_profile(const RealSymbols& sym, const CovarianceSymbol& q0,
                                       const GridSpec& grid,
                                       const std::vector<Eigen::Vector3i>& probes,
                                       const std::vector<double>& times)
{
    ConvergenceProfile prof;
    prof.times = times;
    prof.probes = probes;

    const std::size_t nt = times.size(), np = probes.size();
    // acc[ti][pi] accumulates e^{-ikz} (cos 2wt B + sin 2wt C) over the
    // band-resolved mode set
    std::vector<Mat8c> acc(nt * np, Mat8c::Zero());
    const int ny = grid.n / 2;

    for (int iz = 0; iz < grid.n; ++iz)
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) {
                if (ix == ny || iy == ny || iz == ny) continue;
                const Vec3 k = grid.wavevector(ix, iy, iz);
                const double w = sym.dispersion(k);
                const Mat8c P = sym.symbol_p(k);
                const Mat8c Q = q0.eval(k);
                const Mat8c PQP = P * Q * P;
                const Mat8c B = 0.5 * Q + PQP / (2.0 * w * w);
                const Mat8c C = (Q * P - P * Q) / (2.0 * w);
                for (std::size_t pi = 0; pi < np; ++pi) {
                    const Vec3 z = grid.h() * probes[pi].cast<double>();
                    const double ph = -k.dot(z);
                    const cplx phase(std::cos(ph), std::sin(ph));
                    for (std::size_t ti = 0; ti < nt; ++ti) {
                        const double a = 2.0 * w * times[ti];
                        acc[ti * np + pi] += phase * (std::cos(a) * B + std::sin(a) * C);
                    }
                }
            }

    const double invL3 = 1.0 / (grid.length * grid.length * grid.length);
    prof.err.assign(nt, std::vector<double>(np, 0.0));
    prof.max_err.assign(nt, 0.0);
    for (std::size_t ti = 0; ti < nt; ++ti)
        for (std::size_t pi = 0; pi < np; ++pi) {
            double e = max_abs(Mat8c(acc[ti * np + pi] * invL3));
            prof.err[ti][pi] = e;
            prof.max_err[ti] = std::max(prof.max_err[ti], e);
        }
    return prof;
}

double quadratic_form_spectral(const SpectralField8& phi_hat, const SymbolFn& q_hat,
                               bool skip_nyquist)
{
    const GridSpec& g = phi_hat.grid;
    const std::size_t sz = g.size();
    const int ny = g.n / 2;
    double acc = 0.0;
    Vec8c v;
    for (int iz = 0; iz < g.n; ++iz)
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix) {
                if (skip_nyquist && (ix == ny || iy == ny || iz == ny)) continue;
                const std::size_t node = g.linear(ix, iy, iz);
                for (int c = 0; c < 8; ++c) v[c] = phi_hat.data[c * sz + node];
                const Mat8c q = q_hat(g.wavevector(ix, iy, iz));
                acc += (v.adjoint() * q * v)(0, 0).real();
            }
    const double h3 = g.h() * g.h() * g.h();
    return acc * h3 / double(sz);
}

double quadratic_form(const RealField8& phi, const SymbolFn& q_hat, bool skip_nyquist)
{
    return quadratic_form_spectral(fft_forward(phi), q_hat, skip_nyquist);
}

double quadratic_form(const TestFunction& phi, const SymbolFn& q_hat, bool skip_nyquist)
{
    return quadratic_form(phi.field, q_hat, skip_nyquist);
}

EquilibriumForm make_equilibrium_form(const RealSymbols& sym, const CovarianceSymbol& q0,
                                      const GridSpec& grid)
{
    EquilibriumForm eq;
    eq.grid = grid;
    eq.q_inf.diagonal = false;
    // beyond the q0 range the Yukawa factor decays like e^{-m r}
    eq.q_inf.corr_range = q0.corr_range + 16.0 / sym.mass();
    eq.q_inf.eval = q_inf_fn(sym, q0);
    return eq;
}

}  // namespace dirac
