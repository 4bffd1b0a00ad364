// Counter-based splittable random streams. Every draw is a pure function of
// (stream key, counter), so any draw can be reproduced from the root seed and
// the path of child() indices that led to it.
#pragma once

#include <cmath>
#include <cstdint>

namespace plgrad {

// SplitMix64 finalizer (Stafford mix 13).
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed)
      : key_(mix64(seed ^ 0x8f1bbcdcbfa53e0bULL)) {}

  // Derives an independent sub-stream; child(i) of the same parent is always
  // the same stream regardless of how many values the parent has produced.
  RandomStream child(std::uint64_t index) const {
    return RandomStream(mix64(key_ ^ mix64(index + 0x3c6ef372fe94f82aULL)),
                        internal_tag{});
  }

  // Key of child(index); lets APIs that take a plain integer seed join the
  // same splitting tree.
  std::uint64_t child_key(std::uint64_t index) const {
    return mix64(key_ ^ mix64(index + 0x3c6ef372fe94f82aULL));
  }

  std::uint64_t next_u64() { return mix64(key_ + kGamma * ++counter_); }

  // Strictly inside (0,1): ((x >> 11) + 0.5) * 2^-53.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  struct internal_tag {};
  RandomStream(std::uint64_t raw_key, internal_tag) : key_(raw_key) {}

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace plgrad
