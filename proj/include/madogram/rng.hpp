#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace madogram {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d4a2ca495df94fULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic stream keyed by (seed, index). Uniform/exponential draws are
/// produced from raw 64-bit words so results are identical across platforms
/// (std::*_distribution is implementation-defined).
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index)
      : eng_(detail::splitmix64(detail::splitmix64(seed) ^
                                detail::splitmix64(~index))) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  /// Unit-rate exponential.
  double exponential() { return -std::log1p(-uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace madogram
