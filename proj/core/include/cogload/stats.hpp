#pragma once

#include <cstddef>
#include <vector>

namespace cogload::metrics {

struct TTestResult {
    double t = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_two_tailed = 1.0;
    std::size_t n = 0;
    double mean_diff = 0.0;
};

/// Paired t-test on d_i = before_i - after_i with sample (n-1) standard
/// deviation and a two-tailed p from the t-distribution with n-1 df.
/// Errors: ShapeError (length mismatch), TooFewSamples (n < 2),
/// DegenerateVariance (all differences equal).
TTestResult paired_t_test(const std::vector<double>& before,
                          const std::vector<double>& after);

/// Survival-based two-tailed p-value for Student's t with `df` degrees of
/// freedom, via the regularized incomplete beta function.
double t_two_tailed_p(double t, std::size_t df);

/// Regularized incomplete beta I_x(a, b) (continued-fraction evaluation).
double incomplete_beta(double a, double b, double x);

}  // namespace cogload::metrics
