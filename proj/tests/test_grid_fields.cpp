#include <doctest.h>

#include <cstdio>

#include "dirac/fft.hpp"
#include "dirac/fields.hpp"
#include "dirac/rng.hpp"

using namespace dirac;

namespace {

RealField8 random_field(const GridSpec& g, std::uint64_t seed)
{
    RealField8 f(g);
    Xoshiro256pp rng(seed);
    for (double& v : f.data) v = rng.normal();
    return f;
}

}  // namespace

TEST_SUITE_BEGIN("grid_fields");

TEST_CASE("grid validation and geometry")
{
    CHECK_THROWS_AS(GridSpec(6, 16.0), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(24, 16.0), std::invalid_argument);  // not a power of two
    CHECK_THROWS_AS(GridSpec(16, -1.0), std::invalid_argument);

    GridSpec g(16, 32.0);
    CHECK(g.h() == 2.0);
    CHECK(g.coord(0) == 0.0);
    CHECK(g.coord(8) == -16.0);
    CHECK(g.coord(15) == -2.0);
    CHECK(g.wavenumber(1) == doctest::Approx(2.0 * 3.14159265358979 / 32.0));
    CHECK(g.node_radius(0, 0, 0) == 0.0);
    CHECK(g.node_radius(15, 0, 0) == 2.0);  // wraps to -1 in lattice units
    CHECK(g.index_of(-2.0) == 15);
    CHECK(g.index_of(0.0) == 0);
}

TEST_CASE("realify is the (Re, Im) stacking and has exact round trip")
{
    GridSpec g(8, 8.0);
    SpinorField psi(g);
    psi.at(0, g.linear(1, 2, 3)) = cplx(1, 2);
    psi.at(3, g.linear(1, 2, 3)) = cplx(-0.5, 4);

    RealField8 r = realify(psi);
    CHECK(r.at(0, g.linear(1, 2, 3)) == 1.0);
    CHECK(r.at(4, g.linear(1, 2, 3)) == 2.0);
    CHECK(r.at(3, g.linear(1, 2, 3)) == -0.5);
    CHECK(r.at(7, g.linear(1, 2, 3)) == 4.0);

    SpinorField back = complexify(r);
    for (std::size_t i = 0; i < psi.data.size(); ++i) CHECK(back.data[i] == psi.data[i]);

    // pointwise norm preservation on random data
    Xoshiro256pp rng(3);
    for (auto& v : psi.data) v = cplx(rng.normal(), rng.normal());
    RealField8 rr = realify(psi);
    const std::size_t sz = g.size();
    for (std::size_t i = 0; i < sz; ++i) {
        double c4 = 0, r8 = 0;
        for (int c = 0; c < 4; ++c) c4 += std::norm(psi.data[c * sz + i]);
        for (int c = 0; c < 8; ++c) r8 += rr.data[c * sz + i] * rr.data[c * sz + i];
        CHECK(c4 == doctest::Approx(r8).epsilon(1e-14));
    }
}

TEST_CASE("inner product: charge, symmetry, Parseval")
{
    GridSpec g(16, 16.0);
    RealField8 a = random_field(g, 1), b = random_field(g, 2);

    CHECK(inner(a, a) == doctest::Approx(charge(a)).epsilon(1e-13));
    CHECK(inner(a, b) == inner(b, a));

    RealField8 mismatched(GridSpec(8, 16.0));
    CHECK_THROWS_AS(inner(a, mismatched), std::invalid_argument);

    // spectral side with the raw-sum forward convention: divide by n^3
    SpectralField8 fa = fft_forward(a), fb = fft_forward(b);
    cplx spectral(0, 0);
    for (std::size_t i = 0; i < fa.data.size(); ++i)
        spectral += fa.data[i] * std::conj(fb.data[i]);
    double h3 = g.h() * g.h() * g.h();
    double lhs = spectral.real() * h3 / double(g.size());
    CHECK(lhs == doctest::Approx(inner(a, b)).epsilon(1e-12));
}

TEST_CASE("local seminorm")
{
    GridSpec g(16, 16.0);
    SpinorField psi = complexify(random_field(g, 7));

    CHECK_THROWS_AS(local_seminorm(psi, 0.5 * g.length), std::invalid_argument);
    CHECK_THROWS_AS(local_seminorm(psi, 0.867 * g.length), std::invalid_argument);

    // compactly supported data: ball covering the support gives the charge
    TestFunction tf = make_bump(g, {BumpKind::smooth, 3.0, 1.0, 0, 1.0});
    SpinorField bump = complexify(tf.field);
    CHECK(local_seminorm(bump, 5.0) ==
          doctest::Approx(std::sqrt(charge(bump))).epsilon(1e-12));

    double prev = 0.0;
    for (double R : {1.0, 2.0, 4.0, 6.0, 7.9}) {
        double v = local_seminorm(psi, R);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("support radius")
{
    GridSpec g(16, 16.0);
    SpinorField point(g);
    point.at(2, g.linear(0, 0, 0)) = cplx(0, 1);
    CHECK(support_radius(point, 1e-12) == 0.0);
    CHECK(support_radius(point, 1e12) == 0.0);  // floor above every amplitude

    SpinorField shifted(g);
    shifted.at(0, g.linear(3, 0, 0)) = cplx(1, 0);
    CHECK(support_radius(shifted, 1e-12) == doctest::Approx(3.0));
}

TEST_CASE("fft: constant field, round trip, Hermitian symmetry")
{
    GridSpec g(16, 16.0);
    RealField8 c(g);
    for (std::size_t i = 0; i < g.size(); ++i) c.at(5, i) = 2.5;
    SpectralField8 spec = fft_forward(c);
    CHECK(std::abs(spec.at(5, 0) - cplx(2.5 * g.size(), 0)) <= 1e-9);
    double off = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) off = std::max(off, std::abs(spec.at(5, i)));
    CHECK(off <= 1e-9);

    RealField8 r = random_field(g, 9);
    double resid = 0.0;
    RealField8 back = fft_inverse(fft_forward(r), &resid);
    double diff = 0.0;
    for (std::size_t i = 0; i < r.data.size(); ++i)
        diff = std::max(diff, std::abs(back.data[i] - r.data[i]));
    CHECK(diff <= 1e-12);
    CHECK(resid <= 1e-12);

    SpectralField8 fr = fft_forward(r);
    double herm = 0.0;
    for (int c8 = 0; c8 < 8; ++c8)
        for (int iz = 0; iz < g.n; ++iz)
            for (int iy = 0; iy < g.n; ++iy)
                for (int ix = 0; ix < g.n; ++ix) {
                    std::size_t a = g.linear(ix, iy, iz);
                    std::size_t b = g.linear((g.n - ix) % g.n, (g.n - iy) % g.n,
                                             (g.n - iz) % g.n);
                    herm = std::max(herm,
                                    std::abs(fr.at(c8, a) - std::conj(fr.at(c8, b))));
                }
    CHECK(herm <= 1e-9);
}

TEST_CASE("bump construction")
{
    GridSpec g(32, 32.0);
    TestFunction tf = make_bump(g, {BumpKind::smooth, 4.0, 1.0, 1, 2.0});
    CHECK(tf.radius == 4.0);
    CHECK(tf.field.at(1, g.linear(0, 0, 0)) == 2.0);  // exp(1 - 1/(1-0)) = 1 at the center
    CHECK(support_radius(tf.field, 1e-300) < 4.0 + 1e-12);

    TestFunction pt = make_bump(g, {BumpKind::point, 1.0, 1.0, 0, 3.0});
    CHECK(pt.field.at(0, g.linear(0, 0, 0)) == 3.0);
    CHECK(support_radius(pt.field, 1e-300) == 0.0);

    CHECK_THROWS_AS(make_bump(g, {BumpKind::smooth, 20.0, 1.0, 0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_bump(g, {BumpKind::smooth, 4.0, 1.0, 9, 1.0}), std::invalid_argument);
}

TEST_CASE("binary dump round trip")
{
    GridSpec g(8, 8.0);
    RealField8 f = random_field(g, 21);
    const std::string path = "dump_test.field";
    dump_field(f, path);
    RealField8 back = load_real_field(path);
    CHECK(back.grid == g);
    CHECK(back.data == f.data);
    std::remove(path.c_str());
}

TEST_SUITE_END();
