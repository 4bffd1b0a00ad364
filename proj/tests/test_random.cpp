#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "plgrad/random.hpp"

using namespace plgrad;

TEST_CASE("same seed gives identical streams") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("children are independent of parent consumption") {
  RandomStream parent(9);
  RandomStream before = parent.child(3);
  for (int i = 0; i < 57; ++i) parent.uniform();
  RandomStream after = parent.child(3);
  for (int i = 0; i < 20; ++i) CHECK(before.next_u64() == after.next_u64());
}

TEST_CASE("distinct children differ") {
  RandomStream parent(9);
  RandomStream a = parent.child(0);
  RandomStream b = parent.child(1);
  CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("uniforms live strictly inside the unit interval") {
  RandomStream s(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniforms pass a KS test") {
  RandomStream s(2);
  std::vector<double> draws(100000);
  for (auto& d : draws) d = s.uniform();
  const double d = oracles::ks_statistic(draws, [](double x) { return x; });
  CHECK(d < oracles::ks_threshold(draws.size(), 1e-3));
}

TEST_CASE("gaussians match moments of the standard normal") {
  RandomStream s(4);
  oracles::RunningStat stat;
  for (int i = 0; i < 200000; ++i) stat.add(s.gaussian());
  CHECK(std::abs(stat.mean()) < 3.0 * stat.std_error());
  CHECK(stat.variance() == doctest::Approx(1.0).epsilon(0.02));
}
