#include "dirac/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dirac {

double normal_two_sided_pvalue(double z)
{
    return std::erfc(std::abs(z) / 1.4142135623730950488);
}

MomentSummary summarize_moments(const std::vector<double>& xs)
{
    if (xs.size() < 4) throw std::invalid_argument("summarize_moments: need at least 4 values");
    const double n = double(xs.size());

    CompensatedSum s;
    for (double x : xs) s.add(x);
    const double mean = s.value() / n;

    CompensatedSum m2, m3, m4;
    for (double x : xs) {
        double d = x - mean;
        double d2 = d * d;
        m2.add(d2);
        m3.add(d2 * d);
        m4.add(d2 * d2);
    }
    const double v2 = m2.value() / n;
    const double v3 = m3.value() / n;
    const double v4 = m4.value() / n;

    MomentSummary out;
    out.count = xs.size();
    out.mean = mean;
    out.variance = v2;
    out.mean_se = std::sqrt(v2 / (n - 1.0));
    out.variance_se = std::sqrt(std::max(0.0, v4 - v2 * v2) / n);
    if (v2 > 0.0) {
        out.skewness = v3 / std::pow(v2, 1.5);
        out.excess_kurtosis = v4 / (v2 * v2) - 3.0;
    }
    out.skewness_se = std::sqrt(6.0 / n);
    out.kurtosis_se = std::sqrt(24.0 / n);
    out.skewness_pvalue = normal_two_sided_pvalue(out.skewness / out.skewness_se);
    out.kurtosis_pvalue = normal_two_sided_pvalue(out.excess_kurtosis / out.kurtosis_se);
    return out;
}

CharFnEstimate empirical_char_fn(const std::vector<double>& xs, double lambda)
{
    if (xs.size() < 2) throw std::invalid_argument("empirical_char_fn: need at least 2 values");
    const double n = double(xs.size());
    CompensatedSum sre, sim;
    for (double x : xs) {
        sre.add(std::cos(lambda * x));
        sim.add(std::sin(lambda * x));
    }
    const double mre = sre.value() / n, mim = sim.value() / n;

    // jackknife over leave-one-out means
    CompensatedSum vre, vim;
    for (double x : xs) {
        double dre = (sre.value() - std::cos(lambda * x)) / (n - 1.0) - mre;
        double dim = (sim.value() - std::sin(lambda * x)) / (n - 1.0) - mim;
        vre.add(dre * dre);
        vim.add(dim * dim);
    }
    const double jack = (n - 1.0) / n;
    CharFnEstimate out;
    out.value = {mre, mim};
    out.se = std::sqrt(jack * (vre.value() + vim.value()));
    return out;
}

namespace {

// Kolmogorov tail Q(t) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 t^2}
double kolmogorov_tail(double t)
{
    if (t <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        double term = std::exp(-2.0 * j * j * t * t);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_test_normal(std::vector<double> xs, double sigma)
{
    if (xs.size() < 8) throw std::invalid_argument("ks_test_normal: need at least 8 values");
    if (!(sigma > 0.0)) throw std::invalid_argument("ks_test_normal: sigma must be positive");
    std::sort(xs.begin(), xs.end());
    const double n = double(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double cdf = 0.5 * std::erfc(-xs[i] / (sigma * 1.4142135623730950488));
        d = std::max(d, std::abs(cdf - double(i) / n));
        d = std::max(d, std::abs(cdf - double(i + 1) / n));
    }
    KsResult out;
    out.statistic = d;
    double sq = std::sqrt(n);
    out.pvalue = kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d);
    return out;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_power_law: need matching arrays of size >= 2");
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_power_law: values must be positive");
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    PowerLawFit fit;
    const double denom = n * sxx - sx * sx;
    fit.exponent = (n * sxy - sx * sy) / denom;
    fit.log_prefactor = (sy - fit.exponent * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = std::log(y[i]) - (fit.log_prefactor + fit.exponent * std::log(x[i]));
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

}  // namespace dirac
