#include "plgrad/plackett_luce.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "plgrad/gumbel.hpp"

namespace plgrad {

bool is_permutation(const Permutation& b) {
  const int k = static_cast<int>(b.size());
  std::vector<bool> seen(k, false);
  for (int i = 0; i < k; ++i) {
    if (b[i] < 0 || b[i] >= k || seen[b[i]]) return false;
    seen[b[i]] = true;
  }
  return k >= 1;
}

Permutation argsort_descending(const Eigen::VectorXd& z) {
  const int k = static_cast<int>(z.size());
  Permutation idx(k);
  std::iota(idx.data(), idx.data() + k, 0);
  std::stable_sort(idx.data(), idx.data() + k,
                   [&](int a, int b) { return z[a] > z[b]; });
  return idx;
}

Permutation inverse_permutation(const Permutation& b) {
  Permutation pos(b.size());
  for (int i = 0; i < b.size(); ++i) pos[b[i]] = i;
  return pos;
}

double logsumexp(const Eigen::VectorXd& x) {
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((x.array() - m).exp().sum());
}

namespace {

// log Theta_j = log sum_{u=j..k-1} exp theta[b_u], for j = 0..k-1.
Eigen::VectorXd suffix_logsumexp(const Eigen::VectorXd& theta,
                                 const Permutation& b) {
  const int k = static_cast<int>(b.size());
  Eigen::VectorXd log_theta_suffix(k);
  log_theta_suffix[k - 1] = theta[b[k - 1]];
  for (int j = k - 2; j >= 0; --j) {
    log_theta_suffix[j] = logaddexp(theta[b[j]], log_theta_suffix[j + 1]);
  }
  return log_theta_suffix;
}

void check_dims(const Eigen::VectorXd& theta, const Permutation& b) {
  if (theta.size() != b.size()) {
    throw std::invalid_argument("scores and permutation sizes differ");
  }
  if (!is_permutation(b)) {
    throw std::invalid_argument("not a permutation");
  }
}

}  // namespace

double log_prob(const Eigen::VectorXd& theta, const Permutation& b) {
  check_dims(theta, b);
  const Eigen::VectorXd suffix = suffix_logsumexp(theta, b);
  double lp = 0.0;
  for (int j = 0; j < b.size(); ++j) lp += theta[b[j]] - suffix[j];
  return lp;
}

Eigen::VectorXd grad_log_prob(const Eigen::VectorXd& theta,
                              const Permutation& b) {
  check_dims(theta, b);
  const int k = static_cast<int>(b.size());
  const Eigen::VectorXd suffix = suffix_logsumexp(theta, b);
  // Item m at position i contributes 1 - sum_{j<=i} exp(theta_m - log Theta_j);
  // each term lies in (0, 1] since Theta_j includes exp(theta_m) for j <= i.
  Eigen::VectorXd grad(k);
  for (int i = 0; i < k; ++i) {
    double occupancy = 0.0;
    for (int j = 0; j <= i; ++j) occupancy += std::exp(theta[b[i]] - suffix[j]);
    grad[b[i]] = 1.0 - occupancy;
  }
  return grad;
}

std::pair<Permutation, GumbelDraw> sample(const Eigen::VectorXd& theta,
                                          const Eigen::VectorXd& seeds) {
  if (theta.size() != seeds.size()) {
    throw std::invalid_argument("need one seed per score");
  }
  GumbelDraw draw;
  draw.seeds = seeds;
  draw.z.resize(theta.size());
  for (int i = 0; i < theta.size(); ++i) {
    draw.z[i] = sample_gumbel(theta[i], seeds[i]);
  }
  return {argsort_descending(draw.z), std::move(draw)};
}

std::pair<Permutation, GumbelDraw> sample(const Eigen::VectorXd& theta,
                                          RandomStream& stream) {
  Eigen::VectorXd seeds(theta.size());
  for (int i = 0; i < theta.size(); ++i) seeds[i] = stream.uniform();
  return sample(theta, seeds);
}

ConditionalGumbelDraw sample_conditional(const Eigen::VectorXd& theta,
                                         const Permutation& b,
                                         const Eigen::VectorXd& seeds) {
  check_dims(theta, b);
  if (seeds.size() != b.size()) {
    throw std::invalid_argument("need one seed per score");
  }
  const int k = static_cast<int>(b.size());
  const Eigen::VectorXd normalized = normalize_scores(theta);
  const Eigen::VectorXd log_cum = suffix_logsumexp(normalized, b);

  ConditionalGumbelDraw draw;
  draw.seeds = seeds;
  draw.cumulative_scores = log_cum.array().exp();
  draw.z_tilde.resize(k);

  // Top of the chain is Gumbel(0,1); log Theta_0 = 0 on normalized scores.
  double prev = sample_gumbel(0.0, seeds[0]);
  draw.z_tilde[b[0]] = prev;
  for (int i = 1; i < k; ++i) {
    double zi = sample_truncated_gumbel(log_cum[i], prev, seeds[i]);
    // Rounding can land exactly on the truncation point; nudge below so the
    // draw always argsorts back to b.
    if (!(zi < prev)) {
      zi = std::nextafter(prev, -std::numeric_limits<double>::infinity());
    }
    draw.z_tilde[b[i]] = zi;
    prev = zi;
  }
  return draw;
}

ConditionalGumbelDraw sample_conditional(const Eigen::VectorXd& theta,
                                         const Permutation& b,
                                         RandomStream& stream) {
  Eigen::VectorXd seeds(theta.size());
  for (int i = 0; i < theta.size(); ++i) seeds[i] = stream.uniform();
  return sample_conditional(theta, b, seeds);
}

Permutation mode(const Eigen::VectorXd& theta) {
  return argsort_descending(theta);
}

Eigen::VectorXd normalize_scores(const Eigen::VectorXd& theta) {
  return theta.array() - logsumexp(theta);
}

std::vector<std::pair<Permutation, double>> enumerate_distribution(
    const Eigen::VectorXd& theta) {
  const int k = static_cast<int>(theta.size());
  if (k > 8) {
    throw std::invalid_argument("enumeration limited to k <= 8");
  }
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::pair<Permutation, double>> out;
  do {
    Permutation b = Eigen::Map<const Permutation>(perm.data(), k);
    out.emplace_back(b, std::exp(log_prob(theta, b)));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace plgrad
