#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "plgrad/gumbel.hpp"
#include "plgrad/random.hpp"

using namespace plgrad;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("sample_gumbel hand values") {
  CHECK(sample_gumbel(0.0, std::exp(-1.0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sample_gumbel(3.5, std::exp(-1.0)) == doctest::Approx(3.5).epsilon(1e-12));
  // -log(-log(e^-e)) = -log(e) = -1
  CHECK(sample_gumbel(0.0, std::exp(-std::exp(1.0))) ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("sample_gumbel clamps boundary seeds to finite values") {
  CHECK(std::isfinite(sample_gumbel(0.0, 0.0)));
  CHECK(std::isfinite(sample_gumbel(0.0, 1.0)));
  CHECK(std::isfinite(sample_gumbel(0.0, -0.5)));
  CHECK(std::isfinite(sample_gumbel(0.0, 2.0)));
}

TEST_CASE("sample_truncated_gumbel hand values") {
  // z0 = +inf degenerates to the unconditional sampler
  CHECK(sample_truncated_gumbel(0.0, kInf, std::exp(-1.0)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // mu=0, z0=0, v=e^-1: -log(1 + 1) = -log 2
  CHECK(sample_truncated_gumbel(0.0, 0.0, std::exp(-1.0)) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-12));
  // boundary limit v -> 1 approaches the truncation point from below
  const double near_one = sample_truncated_gumbel(0.0, 0.0, 1.0 - 1e-13);
  CHECK(near_one <= 0.0);
  CHECK(near_one == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("truncation bound holds everywhere") {
  RandomStream stream(7);
  for (int i = 0; i < 10000; ++i) {
    const double mu = 6.0 * (stream.uniform() - 0.5);
    const double z0 = 8.0 * (stream.uniform() - 0.5);
    const double v = stream.uniform();
    CHECK(sample_truncated_gumbel(mu, z0, v) <= z0);
  }
}

TEST_CASE("log pdf and cdf hand values") {
  CHECK(log_cdf_gumbel(0.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(log_pdf_gumbel(0.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(log_cdf_gumbel(std::log(2.0), 0.0) ==
        doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("additive cdf property") {
  RandomStream stream(11);
  for (int i = 0; i < 2000; ++i) {
    const double mu = 6.0 * (stream.uniform() - 0.5);
    const double nu = 6.0 * (stream.uniform() - 0.5);
    const double z = 10.0 * (stream.uniform() - 0.5);
    const double lhs = log_cdf_gumbel(logaddexp(mu, nu), z);
    const double rhs = log_cdf_gumbel(mu, z) + log_cdf_gumbel(nu, z);
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("gumbel draws pass a KS test against the cdf") {
  const std::size_t n = 100000;
  RandomStream stream(3);
  std::vector<double> draws(n);
  for (auto& d : draws) d = sample_gumbel(0.0, stream.uniform());
  const double d = oracles::ks_statistic(
      draws, [](double z) { return std::exp(log_cdf_gumbel(0.0, z)); });
  CHECK(d < oracles::ks_threshold(n, 1e-3));
}

TEST_CASE("truncated sampler is the inverse cdf of the truncated gumbel") {
  const std::size_t n = 100000;
  const double z0 = 1.0;
  RandomStream stream(5);
  std::vector<double> draws(n);
  for (auto& d : draws) d = sample_truncated_gumbel(0.0, z0, stream.uniform());
  const double f_at_z0 = std::exp(log_cdf_gumbel(0.0, z0));
  const double d = oracles::ks_statistic(draws, [&](double z) {
    return std::exp(log_cdf_gumbel(0.0, std::min(z, z0))) / f_at_z0;
  });
  CHECK(d < oracles::ks_threshold(n, 1e-3));
}

TEST_CASE("logaddexp handles infinities") {
  CHECK(logaddexp(-kInf, 2.0) == 2.0);
  CHECK(logaddexp(2.0, -kInf) == 2.0);
  CHECK(logaddexp(-kInf, -kInf) == -kInf);
  CHECK(logaddexp(kInf, 0.0) == kInf);
  CHECK(logaddexp(700.0, 700.0) == doctest::Approx(700.0 + std::log(2.0)));
}
