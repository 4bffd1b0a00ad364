// Gumbel and truncated-Gumbel primitives, unit scale throughout.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace plgrad {

inline constexpr double kUniformEps = 1e-12;

// Uniform seeds are clamped to [EPS, 1-EPS] so log(-log v) stays finite.
inline double clamp_uniform(double v) {
  return std::min(1.0 - kUniformEps, std::max(kUniformEps, v));
}

// log(exp(a) + exp(b)) without overflow; tolerates -inf operands.
inline double logaddexp(double a, double b) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (a == inf || b == inf) return inf;
  if (a == -inf) return b;
  if (b == -inf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Inverse-CDF sample from Gumbel(mu, 1): mu - log(-log v).
inline double sample_gumbel(double mu, double v) {
  return mu - std::log(-std::log(clamp_uniform(v)));
}

// Inverse-CDF sample from Gumbel(mu, 1) truncated at z0, i.e.
// -log(-log(v)/exp(mu) + exp(-z0)), evaluated in log space. z0 = +inf
// degenerates to the unconditional sampler. The result never exceeds z0.
inline double sample_truncated_gumbel(double mu, double z0, double v) {
  const double log_neg_log_v = std::log(-std::log(clamp_uniform(v)));
  return -logaddexp(log_neg_log_v - mu, -z0);
}

// log g_mu(z) = -z + mu - exp(-z + mu)
inline double log_pdf_gumbel(double mu, double z) {
  const double w = -z + mu;
  return w - std::exp(w);
}

// log F_mu(z) = -exp(-z + mu)
inline double log_cdf_gumbel(double mu, double z) {
  return -std::exp(-z + mu);
}

}  // namespace plgrad
