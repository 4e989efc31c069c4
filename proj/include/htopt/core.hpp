// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace htopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Euclidean norm of any dense expression.
template <class Derived>
double norm(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

// Identifies one reproducible random stream. Streams are counter-based:
// stream k can be constructed directly from (master_seed, k) without
// creating streams 0..k-1 first.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic random stream over std::mt19937_64 (whose output sequence is
// fully pinned by the standard). The float conversions are spelled out by
// hand because std::uniform_real_distribution / std::normal_distribution are
// not bit-reproducible across standard-library implementations.
class RngStream {
 public:
  explicit RngStream(const SeedSpec& seed) {
    std::uint64_t state = seed.master_seed;
    const std::uint64_t w0 = detail::splitmix64(state);
    // Odd multiplier keeps distinct stream indices on distinct orbits.
    state ^= seed.stream_index * 0xda942042e4dd58b5ULL;
    const std::uint64_t w1 = detail::splitmix64(state);
    const std::uint64_t w2 = detail::splitmix64(state);
    const std::uint64_t w3 = detail::splitmix64(state);
    std::seed_seq seq{static_cast<std::uint32_t>(w0), static_cast<std::uint32_t>(w0 >> 32),
                      static_cast<std::uint32_t>(w1), static_cast<std::uint32_t>(w1 >> 32),
                      static_cast<std::uint32_t>(w2), static_cast<std::uint32_t>(w2 >> 32),
                      static_cast<std::uint32_t>(w3), static_cast<std::uint32_t>(w3 >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log/pow argument.
  double uniform_open01() { return 1.0 - uniform01(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller with a cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open01()));
    const double theta = 2.0 * std::numbers::pi * uniform01();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace htopt
