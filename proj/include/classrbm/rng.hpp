#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace classrbm {

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministically derives a child seed from a base seed and a list of
/// identifiers (grid cell index, repeat number, ...). Used so that concurrent
/// runs own independent generators while the whole experiment stays a pure
/// function of the base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t state = base;
  std::uint64_t out = detail::splitmix64(state);
  for (std::uint64_t id : ids) {
    state ^= id + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
    out ^= detail::splitmix64(state);
  }
  return out;
}

/// One Beta(a, b) draw via the ratio of two gamma variates. Valid for any
/// a, b > 0, including shapes below one where the gamma sampler switches to
/// the boosted small-shape method internally.
inline double sample_beta(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  const double sum = x + y;
  if (sum <= 0.0) {
    // Both variates underflowed to zero; possible only for very small shapes.
    return 0.5;
  }
  return x / sum;
}

}  // namespace classrbm
