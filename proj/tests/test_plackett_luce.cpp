#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "oracles.hpp"
#include "plgrad/gumbel.hpp"
#include "plgrad/plackett_luce.hpp"
#include "plgrad/random.hpp"

using namespace plgrad;

namespace {

Permutation make_perm(std::initializer_list<int> items) {
  Permutation b(static_cast<int>(items.size()));
  int i = 0;
  for (int x : items) b[i++] = x;
  return b;
}

Eigen::VectorXd make_theta(std::initializer_list<double> values) {
  Eigen::VectorXd t(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) t[i++] = x;
  return t;
}

Eigen::VectorXd random_theta(int k, RandomStream& s, double scale = 2.0) {
  Eigen::VectorXd t(k);
  for (int i = 0; i < k; ++i) t[i] = scale * (2.0 * s.uniform() - 1.0);
  return t;
}

std::vector<int> key_of(const Permutation& b) {
  return std::vector<int>(b.data(), b.data() + b.size());
}

}  // namespace

TEST_CASE("log_prob hand values") {
  CHECK(log_prob(make_theta({0, 0, 0}), make_perm({1, 0, 2})) ==
        doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-12));
  CHECK(log_prob(make_theta({std::log(2.0), 0}), make_perm({0, 1})) ==
        doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-12));
  CHECK(log_prob(make_theta({1.7}), make_perm({0})) == 0.0);
}

TEST_CASE("log_prob rejects mismatched dimensions") {
  CHECK_THROWS_AS(log_prob(make_theta({0, 0}), make_perm({0, 1, 2})),
                  std::invalid_argument);
  CHECK_THROWS_AS(log_prob(make_theta({0, 0}), make_perm({0, 0})),
                  std::invalid_argument);
}

TEST_CASE("log_prob is shift invariant") {
  RandomStream s(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(s.next_below(5));
    const Eigen::VectorXd theta = random_theta(k, s);
    const Permutation b = sample(theta, s).first;
    const double c = 8.0 * (s.uniform() - 0.5);
    const double shifted =
        log_prob((theta.array() + c).matrix(), b);
    CHECK(std::abs(shifted - log_prob(theta, b)) < 1e-9);
  }
}

TEST_CASE("grad_log_prob hand value and zero sum") {
  const Eigen::VectorXd g =
      grad_log_prob(make_theta({0, 0}), make_perm({0, 1}));
  CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(-0.5).epsilon(1e-12));

  RandomStream s(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(s.next_below(5));
    const Eigen::VectorXd theta = random_theta(k, s);
    const Permutation b = sample(theta, s).first;
    CHECK(std::abs(grad_log_prob(theta, b).sum()) < 1e-10);
  }
}

TEST_CASE("grad_log_prob matches finite differences of log_prob") {
  RandomStream s(29);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + static_cast<int>(s.next_below(4));
    Eigen::VectorXd theta = random_theta(k, s);
    const Permutation b = sample(theta, s).first;
    const Eigen::VectorXd g = grad_log_prob(theta, b);
    for (int i = 0; i < k; ++i) {
      const double fd = oracles::central_difference(
          [&](double x) {
            Eigen::VectorXd t = theta;
            t[i] = x;
            return log_prob(t, b);
          },
          theta[i], h);
      CHECK(std::abs(g[i] - fd) < 1e-6);
    }
  }
}

TEST_CASE("score identity: expected gradient is zero") {
  RandomStream s(31);
  for (int k = 2; k <= 5; ++k) {
    const Eigen::VectorXd theta = random_theta(k, s);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(k);
    for (const auto& [b, p] : enumerate_distribution(theta)) {
      total += p * grad_log_prob(theta, b);
    }
    CHECK(total.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("sample: k=1 and uniform frequencies") {
  RandomStream s(37);
  CHECK(sample(make_theta({0.3}), s).first[0] == 0);

  const Eigen::VectorXd theta = make_theta({0, 0, 0});
  std::map<std::vector<int>, int> counts;
  const int n = 100000;
  RandomStream draws(41);
  for (int i = 0; i < n; ++i) {
    RandomStream d = draws.child(i);
    counts[key_of(sample(theta, d).first)] += 1;
  }
  CHECK(counts.size() == 6);
  const double p = 1.0 / 6.0;
  const double sigma = std::sqrt(n * p * (1 - p));
  for (const auto& [perm, count] : counts) {
    CHECK(std::abs(count - n * p) < 3.0 * sigma);
  }
}

TEST_CASE("sample frequency matches log_prob for a biased pair") {
  const Eigen::VectorXd theta = make_theta({std::log(2.0), 0.0});
  const int n = 100000;
  int first = 0;
  RandomStream draws(43);
  for (int i = 0; i < n; ++i) {
    RandomStream d = draws.child(i);
    if (sample(theta, d).first[0] == 0) ++first;
  }
  const double p = 2.0 / 3.0;
  CHECK(std::abs(first - n * p) < 3.0 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("chi-square fit of empirical frequencies vs enumeration, k=4") {
  RandomStream s(47);
  const Eigen::VectorXd theta = random_theta(4, s, 1.0);
  const auto dist = enumerate_distribution(theta);
  std::map<std::vector<int>, int> counts;
  const int n = 100000;
  RandomStream draws(53);
  for (int i = 0; i < n; ++i) {
    RandomStream d = draws.child(i);
    counts[key_of(sample(theta, d).first)] += 1;
  }
  double chi_sq = 0.0;
  for (const auto& [b, p] : dist) {
    const double expected = n * p;
    const double observed = counts[key_of(b)];
    chi_sq += (observed - expected) * (observed - expected) / expected;
  }
  // 0.999 quantile of chi-square with 23 degrees of freedom
  CHECK(chi_sq < 49.728);
}

TEST_CASE("sample_conditional always argsorts back to b") {
  RandomStream s(59);
  for (int trial = 0; trial < 100000; ++trial) {
    RandomStream t = s.child(trial);
    const int k = 2 + static_cast<int>(t.next_below(5));
    const Eigen::VectorXd theta = random_theta(k, t, 3.0);
    const Permutation b = sample(theta, t).first;
    const ConditionalGumbelDraw draw = sample_conditional(theta, b, t);
    CHECK((argsort_descending(draw.z_tilde) - b).cwiseAbs().sum() == 0);
  }
}

TEST_CASE("sample_conditional cumulative scores decrease and start at one") {
  RandomStream s(61);
  for (int trial = 0; trial < 100; ++trial) {
    RandomStream t = s.child(trial);
    const Eigen::VectorXd theta = random_theta(5, t);
    const Permutation b = sample(theta, t).first;
    const ConditionalGumbelDraw draw = sample_conditional(theta, b, t);
    CHECK(draw.cumulative_scores[0] == doctest::Approx(1.0).epsilon(1e-9));
    for (int i = 1; i < 5; ++i) {
      CHECK(draw.cumulative_scores[i] < draw.cumulative_scores[i - 1]);
    }
  }
}

TEST_CASE("sample_conditional with k=1 is a standard gumbel") {
  const std::size_t n = 100000;
  RandomStream s(67);
  std::vector<double> draws(n);
  const Eigen::VectorXd theta = make_theta({2.5});
  const Permutation b = make_perm({0});
  for (auto& d : draws) {
    Eigen::VectorXd seeds(1);
    seeds[0] = s.uniform();
    d = sample_conditional(theta, b, seeds).z_tilde[0];
  }
  const double dstat = oracles::ks_statistic(
      draws, [](double z) { return std::exp(log_cdf_gumbel(0.0, z)); });
  CHECK(dstat < oracles::ks_threshold(n, 1e-3));
}

TEST_CASE("two-pipeline joint law agreement at k=3") {
  // Proposition-level check: {b from PL, z~ | b} must match {argsort(z), z}
  // when both run at normalized scores.
  const Eigen::VectorXd theta = make_theta({0.3, -0.2, 0.1});
  const Eigen::VectorXd theta_n = normalize_scores(theta);
  const int n = 200000;

  struct PerPerm {
    oracles::RunningStat coord[3];
  };
  std::map<std::vector<int>, PerPerm> direct, conditioned;

  RandomStream sa(101), sb(102);
  for (int i = 0; i < n; ++i) {
    RandomStream d = sa.child(i);
    const auto [b, draw] = sample(theta_n, d);
    auto& cell = direct[key_of(b)];
    for (int c = 0; c < 3; ++c) cell.coord[c].add(draw.z[c]);
  }
  for (int i = 0; i < n; ++i) {
    RandomStream d = sb.child(i);
    const Permutation b = sample(theta, d).first;
    const ConditionalGumbelDraw draw = sample_conditional(theta, b, d);
    auto& cell = conditioned[key_of(b)];
    for (int c = 0; c < 3; ++c) cell.coord[c].add(draw.z_tilde[c]);
  }

  CHECK(direct.size() == 6);
  CHECK(conditioned.size() == 6);
  for (auto& [perm, a] : direct) {
    auto& b = conditioned[perm];
    for (int c = 0; c < 3; ++c) {
      const double gap = std::abs(a.coord[c].mean() - b.coord[c].mean());
      const double se = std::sqrt(a.coord[c].std_error() * a.coord[c].std_error() +
                                  b.coord[c].std_error() * b.coord[c].std_error());
      CHECK(gap < 3.0 * se);
    }
  }
}

TEST_CASE("mode hand values and tie break") {
  const Permutation m1 = mode(make_theta({1, 3, 2}));
  CHECK(m1[0] == 1);
  CHECK(m1[1] == 2);
  CHECK(m1[2] == 0);
  const Permutation m2 = mode(make_theta({0, 0}));
  CHECK(m2[0] == 0);
  CHECK(m2[1] == 1);
}

TEST_CASE("mode maximizes enumerated probability") {
  RandomStream s(79);
  for (int trial = 0; trial < 100; ++trial) {
    RandomStream t = s.child(trial);
    const int k = 2 + static_cast<int>(t.next_below(5));
    const Eigen::VectorXd theta = random_theta(k, t);
    const Permutation m = mode(theta);
    const double mode_lp = log_prob(theta, m);
    for (const auto& [b, p] : enumerate_distribution(theta)) {
      CHECK(mode_lp >= std::log(p) - 1e-12);
    }
  }
}

TEST_CASE("normalize_scores properties") {
  const Eigen::VectorXd n0 = normalize_scores(make_theta({0, 0}));
  CHECK(n0[0] == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
  CHECK(n0[1] == doctest::Approx(-std::log(2.0)).epsilon(1e-12));

  RandomStream s(83);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(s.next_below(6));
    const Eigen::VectorXd theta = random_theta(k, s);
    const Eigen::VectorXd normalized = normalize_scores(theta);
    CHECK(std::abs(logsumexp(normalized)) < 1e-12);
    const Permutation b = sample(theta, s).first;
    CHECK(std::abs(log_prob(theta, b) - log_prob(normalized, b)) < 1e-10);
  }
}

TEST_CASE("enumerate_distribution hand values and mass") {
  const auto pair = enumerate_distribution(make_theta({0, 0}));
  CHECK(pair.size() == 2);
  CHECK(pair[0].second == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pair[1].second == doctest::Approx(0.5).epsilon(1e-12));

  const auto biased = enumerate_distribution(make_theta({std::log(2.0), 0}));
  CHECK(biased[0].first[0] == 0);  // lexicographic order: (0,1) first
  CHECK(biased[0].second == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(biased[1].second == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  RandomStream s(89);
  const auto dist = enumerate_distribution(random_theta(3, s));
  double mass = 0.0;
  for (const auto& [b, p] : dist) mass += p;
  CHECK(std::abs(mass - 1.0) < 1e-9);

  Eigen::VectorXd big = Eigen::VectorXd::Zero(9);
  CHECK_THROWS_AS(enumerate_distribution(big), std::invalid_argument);
}

TEST_CASE("extreme scores do not overflow") {
  const Eigen::VectorXd theta = make_theta({800.0, -800.0, 0.0});
  const Permutation b = make_perm({0, 2, 1});
  CHECK(std::isfinite(log_prob(theta, b)));
  CHECK(grad_log_prob(theta, b).allFinite());
  RandomStream s(97);
  const ConditionalGumbelDraw draw = sample_conditional(theta, b, s);
  CHECK(draw.z_tilde.allFinite());
  CHECK((argsort_descending(draw.z_tilde) - b).cwiseAbs().sum() == 0);
}
