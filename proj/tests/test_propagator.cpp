#include <doctest.h>

#include "dirac/fft.hpp"
#include "dirac/propagator.hpp"
#include "dirac/rng.hpp"
#include "dirac/samplers.hpp"

using namespace dirac;

namespace {

// Band-limited random state: spectral Gaussian draw with a soft symbol so
// finite-speed statements survive discretization.
SpinorField smooth_state(const GridSpec& g, std::uint64_t seed, double kappa = 0.6)
{
    SamplerSpec ss;
    ss.kind = SamplerKind::gaussian_spectral;
    ss.grid = g;
    ss.seed = seed;
    ss.family = SymbolFamily::gaussian_bump;
    ss.kappa = kappa;
    return complexify(Sampler(ss).sample(0));
}

double rel_field_diff(const SpinorField& a, const SpinorField& b)
{
    double diff = 0, scale = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        diff = std::max(diff, std::abs(a.data[i] - b.data[i]));
        scale = std::max(scale, std::abs(b.data[i]));
    }
    return diff / scale;
}

}  // namespace

TEST_SUITE_BEGIN("propagator");

TEST_CASE("t = 0 is the identity")
{
    GridSpec g(16, 16.0);
    Propagator prop(g, 1.0);
    SpinorField psi = smooth_state(g, 4);
    CHECK(rel_field_diff(prop.evolve(psi, 0.0), psi) <= 1e-13);
}

TEST_CASE("single Fourier mode transforms by the per-mode symbol")
{
    GridSpec g(16, 16.0);
    Propagator prop(g, 1.0);
    const RealSymbols& sym = prop.symbols();

    const int mx = 2, my = 13, mz = 5;
    Vec3 k0 = g.wavevector(mx, my, mz);
    Xoshiro256pp rng(8);
    Vec8c u;
    for (int c = 0; c < 8; ++c) u[c] = cplx(rng.normal(), rng.normal());

    SpectralField8 single(g);
    std::size_t site = g.linear(mx, my, mz);
    std::size_t mirror = g.linear((g.n - mx) % g.n, (g.n - my) % g.n, (g.n - mz) % g.n);
    for (int c = 0; c < 8; ++c) {
        single.at(c, site) = u[c];
        single.at(c, mirror) = std::conj(u[c]);
    }
    RealField8 mode = fft_inverse(single);

    const double t = 2.6;
    SpectralField8 evolved = fft_forward(prop.evolve(mode, t));
    Vec8c want = sym.propagator(k0, t) * u;
    for (int c = 0; c < 8; ++c)
        CHECK(std::abs(evolved.at(c, site) - want[c]) <= 1e-12 * want.cwiseAbs().maxCoeff());
}

TEST_CASE("charge conservation, group law, time reversal")
{
    GridSpec g(32, 32.0);
    Propagator prop(g, 1.0);

    // smooth data: full-band and resolved-band charges agree below 1e-10
    SpinorField psi = smooth_state(g, 5, 0.4);
    double c0 = charge(psi);
    SpinorField e = prop.evolve(psi, 17.3);
    CHECK(std::abs(charge(e) - c0) / c0 <= 1e-10);

    // states produced by the dynamics conserve charge to roundoff
    SpinorField rough = smooth_state(g, 6, 1.0);
    SpinorField resolved = prop.evolve(rough, 0.5);
    double cr = charge(resolved);
    CHECK(std::abs(charge(prop.evolve(resolved, 7.7)) - cr) / cr <= 1e-13);

    SpinorField two = prop.evolve(prop.evolve(resolved, 1.0), 2.5);
    CHECK(rel_field_diff(two, prop.evolve(resolved, 3.5)) <= 1e-11);

    SpinorField back = prop.evolve(prop.evolve(resolved, 5.0), -5.0);
    CHECK(rel_field_diff(back, resolved) <= 1e-11);
}

TEST_CASE("complex 4x4 route agrees with the real 8x8 route")
{
    GridSpec g(16, 16.0);
    Propagator prop(g, 1.2);
    SpinorField psi = smooth_state(g, 6);
    CHECK(rel_field_diff(prop.evolve(psi, 4.3), prop.evolve_complex4(psi, 4.3)) <= 1e-12);
}

TEST_CASE("duality between forward and adjoint evolution")
{
    GridSpec g(32, 32.0);
    Propagator prop(g, 1.0);
    SpinorField psi = smooth_state(g, 7);
    TestFunction phi = make_bump(g, {BumpKind::smooth, 5.0, 1.0, 3, 1.0});

    for (double t : {0.0, 3.0, 9.5}) {
        double lhs = inner(realify(prop.evolve(psi, t)), phi.field);
        double rhs = inner(realify(psi), prop.adjoint_evolve(phi, t));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
    }

    // adjoint at t = 0 returns the argument
    RealField8 same = prop.adjoint_evolve(phi, 0.0);
    double d = 0;
    for (std::size_t i = 0; i < same.data.size(); ++i)
        d = std::max(d, std::abs(same.data[i] - phi.field.data[i]));
    CHECK(d <= 1e-13);
}

TEST_CASE("finite propagation speed")
{
    GridSpec g(64, 64.0);
    Propagator prop(g, 1.0);

    TestFunction blob = make_bump(g, {BumpKind::gauss_taper, 14.0, 2.2, 0, 1.0});
    SpinorField psi = complexify(blob.field);
    double r0 = support_radius(psi, 1e-9);
    for (double t : {2.0, 4.0, 8.0}) {
        double rt = support_radius(prop.evolve(psi, t), 1e-9);
        CHECK(rt <= r0 + t + std::sqrt(3.0) * g.h());
    }

    // adjoint group lives in the inflated cone |x| <= t + rbar
    TestFunction tight = make_bump(g, {BumpKind::gauss_taper, 12.0, 2.0, 1, 1.0});
    double rb = support_radius(tight.field, 1e-9);
    for (double t : {3.0, 6.0}) {
        RealField8 gt = prop.adjoint_evolve(tight, t);
        CHECK(support_radius(gt, 1e-9) <= rb + t + std::sqrt(3.0) * g.h());
    }
}

TEST_CASE("wraparound budget is flagged, not fatal")
{
    GridSpec g(16, 16.0);
    Propagator prop(g, 1.0);
    TestFunction phi = make_bump(g, {BumpKind::smooth, 3.0, 1.0, 0, 1.0});
    SpinorField psi = complexify(phi.field);
    CHECK_FALSE(prop.evolve(psi, 2.0).wrap_flagged);
    CHECK(prop.evolve(psi, 7.0).wrap_flagged);  // 3 + 7 >= 8 = L/2
}

TEST_CASE("local estimate report")
{
    GridSpec g(32, 32.0);
    Propagator prop(g, 1.0);
    SpinorField psi = smooth_state(g, 9);

    CHECK_THROWS_AS(prop.local_estimate_check(psi, 10.0, 7.0), std::invalid_argument);

    auto rep0 = prop.local_estimate_check(psi, 0.0, 6.0);
    CHECK(rep0.ratio <= 1.0 + 1e-12);

    // compactly supported data with the ball covering the whole cone:
    // charge conservation forces ratio 1 (band-limiting leaks ~1e-8)
    TestFunction blob = make_bump(g, {BumpKind::gauss_taper, 6.0, 1.5, 0, 1.0});
    SpinorField compact = complexify(blob.field);
    auto rep = prop.local_estimate_check(compact, 4.0, 11.0);
    CHECK(rep.ratio >= 1.0 - 1e-6);
    CHECK(rep.ratio <= 1.0 + 1e-12);

    double worst = 0.0;
    for (double t : {2.0, 5.0})
        for (double R : {4.0, 8.0}) {
            auto r = prop.local_estimate_check(psi, t, R);
            worst = std::max(worst, r.ratio);
        }
    CHECK(worst <= 1.0 + 1e-6);
    CHECK(std::isfinite(worst));
}

TEST_SUITE_END();
