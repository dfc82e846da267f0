#pragma once

#include <cstdint>
#include <numbers>
#include <random>

namespace mogvqe {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Stream seed for (master_seed, generation, individual id). Worker scheduling
/// never touches these streams, so results are independent of thread count.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t generation,
                                 std::uint64_t individual_id) {
  std::uint64_t s = detail::splitmix64(master_seed);
  s = detail::splitmix64(s ^ detail::splitmix64(generation + 0x517cc1b727220a95ULL));
  s = detail::splitmix64(s ^ detail::splitmix64(individual_id + 0x2545f4914f6cdd1dULL));
  return s;
}

using Rng = std::mt19937_64;

/// Uniform draw from (-pi, pi].
inline double random_angle(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::numbers::pi * (1.0 - 2.0 * u(rng));
}

}  // namespace mogvqe
