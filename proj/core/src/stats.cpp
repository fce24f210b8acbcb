#include "cogload/stats.hpp"

#include <cmath>

#include "cogload/errors.hpp"

namespace cogload::metrics {

namespace {

// Lentz continued fraction for the incomplete beta function.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEpsilon = 1e-15;
    constexpr double kTiny = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEpsilon) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_two_tailed_p(double t, std::size_t df) {
    if (df == 0) raise(ErrorCode::TooFewSamples, "zero degrees of freedom");
    double v = static_cast<double>(df);
    double x = v / (v + t * t);
    return incomplete_beta(v / 2.0, 0.5, x);
}

TTestResult paired_t_test(const std::vector<double>& before,
                          const std::vector<double>& after) {
    if (before.size() != after.size()) {
        raise(ErrorCode::ShapeError,
              "paired samples differ in length: " + std::to_string(before.size()) +
                  " vs " + std::to_string(after.size()));
    }
    std::size_t n = before.size();
    if (n < 2) raise(ErrorCode::TooFewSamples, "need at least 2 pairs");

    double mean = 0.0;
    std::vector<double> diffs(n);
    for (std::size_t i = 0; i < n; ++i) {
        diffs[i] = before[i] - after[i];
        mean += diffs[i];
    }
    mean /= static_cast<double>(n);

    double ss = 0.0;
    for (double d : diffs) ss += (d - mean) * (d - mean);
    double variance = ss / static_cast<double>(n - 1);
    if (variance <= 0.0) {
        raise(ErrorCode::DegenerateVariance, "all paired differences are equal");
    }

    TTestResult result;
    result.n = n;
    result.degrees_of_freedom = n - 1;
    result.mean_diff = mean;
    result.t = mean / std::sqrt(variance / static_cast<double>(n));
    result.p_two_tailed = t_two_tailed_p(result.t, result.degrees_of_freedom);
    return result;
}

}  // namespace cogload::metrics
