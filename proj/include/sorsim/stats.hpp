#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sorsim::stats {

// Two-sided 95% quantile of the standard normal.
inline constexpr double kZ95 = 1.959963984540054;

double normal_cdf(double x);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gammp(double a, double x);
double gammq(double a, double x);

// Regularized incomplete beta function I_x(a, b).
double betai(double a, double b, double x);

// Upper tail of Student's t distribution with df degrees of freedom.
double student_t_sf(double t, double df);

struct Summary {
    std::uint64_t count = 0;
    double mean = 0.0;
    double variance = 0.0;   // sample variance (n-1 denominator)
    double ci95_half_width = 0.0;
};
Summary summarize(std::span<const double> values);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double half_width() const { return 0.5 * (hi - lo); }
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

struct ChiSquareResult {
    double statistic = 0.0;
    std::uint64_t df = 0;
    double p_value = 1.0;
};

// Goodness of fit of observed counts against expected probabilities.
// Cells with expected count below min_expected are pooled into their
// right neighbour to keep the chi-square approximation honest.
ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                std::span<const double> expected_probability,
                                double min_expected = 5.0);

// Two-sample homogeneity test on a 2 x k contingency table; sparse cells
// (combined count below min_combined) are pooled left to right.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a,
                                      std::span<const std::uint64_t> b,
                                      double min_combined = 10.0);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test, asymptotic p-value with the
// small-sample correction lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) * D.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0;    // one-sided, H1: rho > 0
    std::uint64_t samples = 0;
};

// Spearman rank correlation with average ranks for ties; the p-value uses
// the t approximation with n-2 degrees of freedom.
SpearmanResult spearman_positive(std::span<const double> x, std::span<const double> y);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::uint64_t points = 0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace sorsim::stats
