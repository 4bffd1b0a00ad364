// Test-only oracles: Kolmogorov-Smirnov statistics, finite differences of
// plain (non-tape) functions, and simple statistics helpers. Kept independent
// of the implementation paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

// One-sample KS statistic against a reference CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - (static_cast<double>(i) + 1.0) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

// Asymptotic rejection threshold at significance alpha:
// P(sqrt(n) D > x) ~ 2 exp(-2 x^2).
inline double ks_threshold(std::size_t n, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / 2.0) /
         std::sqrt(static_cast<double>(n));
}

// Central finite difference of a scalar function of one coordinate.
inline double central_difference(const std::function<double(double)>& f,
                                 double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct RunningStat {
  double sum = 0.0;
  double sum_sq = 0.0;
  long n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return sum / n; }
  double variance() const {
    return std::max(0.0, (sum_sq - n * mean() * mean()) / (n - 1));
  }
  double std_error() const { return std::sqrt(variance() / n); }
};

}  // namespace oracles
