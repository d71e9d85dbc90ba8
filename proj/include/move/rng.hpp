#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "move/errors.hpp"

namespace move {

// All randomness flows through mt19937_64 plus the hand-rolled draws below,
// so identical seeds give identical streams on every standard library.
using Rng = std::mt19937_64;

// Uniform in [0, 1) with 53 random bits.
inline double uniform_real(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [lo, hi], both inclusive. Division method, exact.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw ArgumentError("uniform_int: lo > hi");
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return lo + static_cast<std::int64_t>(rng());  // full 64-bit span
  const std::uint64_t buckets = UINT64_MAX / range;
  const std::uint64_t limit = buckets * range;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw / buckets);
}

// Standard normal via the polar method. No cached second value so the
// engine state alone determines every future draw.
inline double normal(Rng& rng) {
  while (true) {
    const double a = 2.0 * uniform_real(rng) - 1.0;
    const double b = 2.0 * uniform_real(rng) - 1.0;
    const double s = a * a + b * b;
    if (s > 0.0 && s < 1.0) {
      return a * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

// Gamma(shape, 1) by Marsaglia-Tsang; shapes below 1 get the power boost.
inline double gamma_draw(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw ArgumentError("gamma_draw: shape must be positive");
  if (shape < 1.0) {
    const double u = uniform_real(rng);
    return gamma_draw(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x;
    double v;
    do {
      x = normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_real(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double beta_draw(Rng& rng, double a, double b) {
  const double x = gamma_draw(rng, a);
  const double y = gamma_draw(rng, b);
  return x / (x + y);
}

// Fisher-Yates with the exact-uniform integer draw above.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i) - 1));
    std::swap(values[i - 1], values[j]);
  }
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  shuffle(perm, rng);
  return perm;
}

// k distinct values from {0, ..., n-1} via a partial Fisher-Yates.
inline std::vector<int> random_subset(int n, int k, Rng& rng) {
  if (k < 0 || k > n) throw ArgumentError("random_subset: k out of range");
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, i, n - 1));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

}  // namespace move
