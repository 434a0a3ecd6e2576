#pragma once

#include <complex>
#include <vector>

namespace dirac {

// Neumaier-compensated accumulator; summation result is independent of how
// work was scheduled as long as values are fed in a fixed order.
class CompensatedSum {
public:
    void add(double v)
    {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct MomentSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;        // population (divide by n)
    double skewness = 0.0;        // m3 / m2^{3/2}
    double excess_kurtosis = 0.0; // m4 / m2^2 - 3
    double mean_se = 0.0;         // sd / sqrt(n)
    double variance_se = 0.0;     // sqrt((m4 - m2^2)/n)
    double skewness_se = 0.0;     // sqrt(6/n)
    double kurtosis_se = 0.0;     // sqrt(24/n)
    double skewness_pvalue = 1.0;
    double kurtosis_pvalue = 1.0;
};

MomentSummary summarize_moments(const std::vector<double>& xs);

// Two-sided normal p-value for observing |z| standard errors.
double normal_two_sided_pvalue(double z);

// Empirical characteristic function E e^{i lambda x} with jackknife standard
// error of the (complex) mean, reported as sqrt(var Re + var Im).
struct CharFnEstimate {
    std::complex<double> value;
    double se = 0.0;
};
CharFnEstimate empirical_char_fn(const std::vector<double>& xs, double lambda);

// Kolmogorov-Smirnov test against a centered normal with the given standard
// deviation. Asymptotic p-value with the Stephens small-sample correction.
struct KsResult {
    double statistic = 0.0;
    double pvalue = 1.0;
};
KsResult ks_test_normal(std::vector<double> xs, double sigma);

// Least-squares slope of log y against log x.
struct PowerLawFit {
    double exponent = 0.0;
    double log_prefactor = 0.0;
    double residual_rms = 0.0;
};
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dirac
