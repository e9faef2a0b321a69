#pragma once

#include <cstdint>
#include <random>

#include "skewmix/special.hpp"

namespace skewmix {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic random stream addressed by (seed, stream).
///
/// Streams with distinct indices are independent for practical purposes and
/// bit-reproducible across runs; normal variates go through the inverse cdf
/// so draws do not depend on the standard library's distribution internals.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed;
    (void)detail::splitmix64(s);
    s ^= 0xD1B54A32D192ED03ULL * (stream + 1);
    gen_.seed(detail::splitmix64(s));
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform draw in the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return inv_std_normal_cdf(uniform01()); }

  double half_normal() { return std::abs(normal()); }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace skewmix
