#include <doctest.h>

#include <cstring>

#include "dirac/covariance.hpp"
#include "dirac/rng.hpp"
#include "dirac/samplers.hpp"
#include "dirac/statistics.hpp"

using namespace dirac;

namespace {

SamplerSpec gaussian_spec(const GridSpec& g, std::uint64_t seed, double kappa = 1.0,
                          double scale = 1.0)
{
    SamplerSpec s;
    s.kind = SamplerKind::gaussian_spectral;
    s.grid = g;
    s.seed = seed;
    s.family = SymbolFamily::gaussian_bump;
    s.kappa = kappa;
    s.scale = scale;
    return s;
}

SamplerSpec ma_spec(const GridSpec& g, std::uint64_t seed, double radius)
{
    SamplerSpec s;
    s.kind = SamplerKind::finite_range_moving_average;
    s.grid = g;
    s.seed = seed;
    s.kernel_radius = radius;
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("samplers");

TEST_CASE("zero symbol produces the zero field")
{
    GridSpec g(8, 8.0);
    SamplerSpec s = gaussian_spec(g, 3);
    s.scale = 0.0;
    RealField8 f = Sampler(s).sample(0);
    for (double v : f.data) CHECK(v == 0.0);
}

TEST_CASE("seed determinism and stream independence")
{
    GridSpec g(8, 8.0);
    for (SamplerSpec s : {gaussian_spec(g, 11), ma_spec(g, 11, 2.0)}) {
        Sampler sampler(s);
        RealField8 a = sampler.sample(7), b = sampler.sample(7), c = sampler.sample(8);
        CHECK(std::memcmp(a.data.data(), b.data.data(), a.data.size() * 8) == 0);
        double diff = 0;
        for (std::size_t i = 0; i < a.data.size(); ++i)
            diff = std::max(diff, std::abs(a.data[i] - c.data[i]));
        CHECK(diff > 1e-6);  // different stream index gives a different field
    }
}

TEST_CASE("gaussian sampler matches its prescribed covariance")
{
    GridSpec g(16, 16.0);
    Sampler sampler(gaussian_spec(g, 42));
    std::vector<Eigen::Vector3i> offsets{{0, 0, 0}, {1, 0, 0}, {0, 1, 1}, {2, 0, 0}, {2, 2, 1}};

    const int M = 600;
    CovarianceAccumulator acc(g, offsets);
    for (int s = 0; s < M; ++s) acc.add(sampler.sample(std::uint64_t(s)));
    CovarianceEstimate est = acc.finalize();

    std::vector<Mat8d> exact = q_position(sampler.exact_covariance(), g, offsets);
    for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
        Mat8d diff = est.value(offsets[oi]) - exact[oi];
        Mat8d se = est.standard_error(offsets[oi]);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                CHECK(std::abs(diff(i, j)) <= 5.0 * std::max(se(i, j), 1e-300));
    }

    // diagonal symbol: distinct components are uncorrelated
    Mat8d at0 = est.value({0, 0, 0});
    Mat8d se0 = est.standard_error({0, 0, 0});
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if (i != j) CHECK(std::abs(at0(i, j)) <= 5.0 * se0(i, j));

    // zero mean within 4 SE
    for (int c = 0; c < 8; ++c)
        CHECK(std::abs(est.component_mean()[c]) <= 4.0 * est.component_mean_se()[c]);
}

TEST_CASE("non-PSD symbol is rejected with the offending mode")
{
    GridSpec g(8, 8.0);
    SamplerSpec s = gaussian_spec(g, 1);
    s.scale = -1.0;
    CHECK_THROWS_WITH_AS(Sampler(s).sample(0), doctest::Contains("not PSD"),
                         std::runtime_error);
}

TEST_CASE("moving average with a point kernel is i.i.d. sign noise")
{
    GridSpec g(8, 8.0);
    Sampler sampler(ma_spec(g, 9, 0.0));
    RealField8 f = sampler.sample(0);
    for (double v : f.data) CHECK(std::abs(std::abs(v) - 1.0) <= 1e-14);

    // site marginal of +-1 noise has excess kurtosis -2
    std::vector<double> site;
    for (int s = 0; s < 64; ++s) {
        RealField8 fs = sampler.sample(std::uint64_t(s));
        site.push_back(fs.at(0, 0));
    }
    // all values +-1: m4/m2^2 - 3 = 1 - 3 = -2 up to the empirical mean shift
    MomentSummary mom = summarize_moments(site);
    CHECK(mom.excess_kurtosis == doctest::Approx(-2.0).epsilon(0.2));

    // flat symbol: q0(z) = delta at 0 in lattice normalization
    CovarianceSymbol sym = sampler.exact_covariance();
    double h3 = g.h() * g.h() * g.h();
    CHECK(sym.eval_diag(Vec3(0.3, -1.0, 0.7))[0] == doctest::Approx(h3).epsilon(1e-12));
    std::vector<Mat8d> pos = q_position(sym, g, {{0, 0, 0}, {1, 0, 0}});
    CHECK(pos[0](0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(pos[1](0, 0)) <= 1e-10);
}

TEST_CASE("moving average matches its closed-form covariance and range")
{
    GridSpec g(16, 16.0);
    const double ra = 2.0;
    Sampler sampler(ma_spec(g, 77, ra));
    CHECK(sampler.correlation_range() == 2.0 * ra);

    std::vector<Eigen::Vector3i> offsets{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {2, 1, 0},
                                         {3, 0, 0}, {5, 0, 0}, {4, 3, 0}, {0, 0, 6}};
    const int M = 600;
    CovarianceAccumulator acc(g, offsets);
    for (int s = 0; s < M; ++s) acc.add(sampler.sample(std::uint64_t(s)));
    CovarianceEstimate est = acc.finalize();

    std::vector<Mat8d> exact = q_position(sampler.exact_covariance(), g, offsets);
    for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
        Mat8d diff = est.value(offsets[oi]) - exact[oi];
        Mat8d se = est.standard_error(offsets[oi]);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                CHECK(std::abs(diff(i, j)) <= 5.0 * std::max(se(i, j), 1e-300));
    }

    // independence beyond 2 r_a: the exact covariance vanishes there...
    for (std::size_t oi = 0; oi < offsets.size(); ++oi)
        if (g.h() * std::sqrt(double(offsets[oi].squaredNorm())) > 2.0 * ra)
            CHECK(max_abs(Mat8d(exact[oi])) <= 1e-12);
    // ...and the empirical one is statistically zero
    Mat8d far = est.value({5, 0, 0}), sefar = est.standard_error({5, 0, 0});
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) CHECK(std::abs(far(i, j)) <= 5.0 * sefar(i, j));
}

TEST_CASE("kernel support larger than L/4 is rejected")
{
    GridSpec g(16, 16.0);
    CHECK_THROWS_AS(Sampler(ma_spec(g, 1, 5.0)), std::invalid_argument);
}

TEST_CASE("estimator symmetry is exact by construction")
{
    GridSpec g(8, 8.0);
    Sampler sampler(ma_spec(g, 5, 2.0));
    std::vector<RealField8> fields;
    for (int s = 0; s < 4; ++s) fields.push_back(sampler.sample(std::uint64_t(s)));
    CovarianceEstimate est = empirical_covariance(fields, {{1, 2, 0}, {0, 1, 1}});
    Eigen::Vector3i z(1, 2, 0);
    Mat8d a = est.value(z), b = est.value(-z);
    CHECK(max_abs(Mat8d(a - b.transpose())) == 0.0);
}

TEST_CASE("constant fields give the rank-one estimate")
{
    GridSpec g(8, 8.0);
    RealField8 c(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        c.at(0, i) = 2.0;
        c.at(3, i) = -1.0;
    }
    CovarianceEstimate est = empirical_covariance({c, c}, {{0, 0, 0}});
    Mat8d v = est.value({0, 0, 0});
    CHECK(v(0, 0) == doctest::Approx(4.0));
    CHECK(v(0, 3) == doctest::Approx(-2.0));
    CHECK(v(3, 3) == doctest::Approx(1.0));
    CHECK(v(1, 1) == 0.0);
}

TEST_CASE("trace integral equals the mean charge density")
{
    GridSpec g(16, 16.0);
    for (SamplerSpec spec : {gaussian_spec(g, 31), ma_spec(g, 31, 2.0)}) {
        Sampler sampler(spec);
        double e0 = mean_charge_density(sampler.exact_covariance(), g);
        const int M = 200;
        double mean = 0, m2 = 0;
        for (int s = 0; s < M; ++s) {
            RealField8 f = sampler.sample(std::uint64_t(s));
            double d = 0;
            for (double v : f.data) d += v * v;
            d /= double(g.size());
            mean += d;
            m2 += d * d;
        }
        mean /= M;
        double se = std::sqrt(std::max(0.0, m2 / M - mean * mean) / (M - 1.0));
        CHECK(std::abs(mean - e0) <= 5.0 * std::max(se, 1e-300));
    }
}

TEST_CASE("noise pullback reproduces projections exactly")
{
    GridSpec g(16, 16.0);
    Sampler sampler(ma_spec(g, 13, 2.0));
    TestFunction phi = make_bump(g, {BumpKind::smooth, 3.0, 1.0, 2, 1.0});

    RealField8 w = sampler.noise_pullback(phi.field);
    for (std::uint64_t s : {0ULL, 5ULL}) {
        double direct = inner(sampler.sample(s), phi.field);
        double fast = sampler.project_noise(s, {&w})[0];
        CHECK(fast == doctest::Approx(direct).epsilon(1e-11));
    }

    Sampler gauss(gaussian_spec(g, 13));
    CHECK_THROWS_AS(gauss.noise_pullback(phi.field), std::logic_error);
    CHECK(gauss.has_noise_pullback() == false);
}

TEST_CASE("symbol PSD scan over the grid")
{
    GridSpec g(8, 8.0);
    for (SamplerSpec spec : {gaussian_spec(g, 2), ma_spec(g, 2, 2.0)}) {
        Sampler sampler(spec);
        Vec3 where;
        CHECK(min_symbol_eigenvalue(sampler.exact_covariance(), g, &where) >= -1e-13);
    }
}

TEST_SUITE_END();
