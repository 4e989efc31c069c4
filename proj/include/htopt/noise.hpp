// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

#include "htopt/core.hpp"

namespace htopt {

enum class NoiseKind { kNone, kGaussian, kSymmetrizedPareto };

inline const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kSymmetrizedPareto: return "symmetrized-pareto";
  }
  throw std::logic_error("unknown noise kind");
}

inline NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "none") return NoiseKind::kNone;
  if (s == "gaussian") return NoiseKind::kGaussian;
  if (s == "symmetrized-pareto") return NoiseKind::kSymmetrizedPareto;
  throw std::invalid_argument("unknown noise kind '" + s + "'");
}

// Additive zero-mean noise with i.i.d. components. The symmetrized Pareto
// component has magnitude M with P(M > m) = (scale/m)^tail_index for
// m >= scale and an independent fair sign, so absolute moments of order
// q < tail_index are finite and orders q >= tail_index diverge.
struct NoiseModel {
  NoiseKind kind = NoiseKind::kSymmetrizedPareto;
  int dim = 1;
  double tail_index = 2.0;  // Pareto shape; must exceed 1 so the mean exists
  double scale = 1.0;       // Pareto minimum magnitude
  double std_dev = 1.0;     // Gaussian component standard deviation

  void validate() const {
    if (dim < 1) throw std::invalid_argument("noise dim must be >= 1");
    switch (kind) {
      case NoiseKind::kNone:
        return;
      case NoiseKind::kGaussian:
        if (!(std_dev > 0.0)) throw std::invalid_argument("noise std_dev must be > 0");
        return;
      case NoiseKind::kSymmetrizedPareto:
        if (!(tail_index > 1.0)) throw std::invalid_argument("noise tail index must be > 1");
        if (!(scale > 0.0)) throw std::invalid_argument("noise scale must be > 0");
        return;
    }
  }
};

// Pareto magnitude from a uniform u in (0, 1]; u = 1 maps to the scale.
inline double pareto_inverse_cdf(double tail_index, double scale, double u) {
  return scale * std::pow(u, -1.0 / tail_index);
}

// E|X|^q for one symmetrized Pareto component; finite only for q < tail_index.
inline double pareto_abs_moment(double tail_index, double scale, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("moment order must be > 0");
  if (!(q < tail_index)) throw std::domain_error("absolute moment of order q >= tail index diverges");
  return std::pow(scale, q) * tail_index / (tail_index - q);
}

// Median of |X| for one symmetrized Pareto component.
inline double pareto_abs_median(double tail_index, double scale) {
  return scale * std::pow(2.0, 1.0 / tail_index);
}

inline void sample_into(const NoiseModel& model, RngStream& stream, Eigen::Ref<Vector> out) {
  switch (model.kind) {
    case NoiseKind::kNone:
      out.setZero();
      return;
    case NoiseKind::kGaussian:
      for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = model.std_dev * stream.normal();
      return;
    case NoiseKind::kSymmetrizedPareto: {
      const double inv_a = -1.0 / model.tail_index;
      for (Eigen::Index i = 0; i < out.size(); ++i) {
        const std::uint64_t bits = stream.next_u64();
        // Bit 0 picks the sign; bits 11..63 form the magnitude uniform, so
        // the two are independent while costing a single engine draw.
        const double u = 1.0 - static_cast<double>(bits >> 11) * 0x1.0p-53;  // (0, 1]
        const double mag = model.scale * std::pow(u, inv_a);
        out[i] = (bits & 1u) ? mag : -mag;
      }
      return;
    }
  }
}

inline Vector sample(const NoiseModel& model, RngStream& stream) {
  Vector v(model.dim);
  sample_into(model, stream, v);
  return v;
}

// Mean of ||column||^q over a sample matrix (one sample per column).
inline double empirical_moment(const Eigen::Ref<const Matrix>& samples, double q) {
  if (samples.cols() == 0) throw std::invalid_argument("empirical moment of an empty sample set");
  if (!(q > 0.0)) throw std::invalid_argument("moment order must be > 0");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < samples.cols(); ++j) acc += std::pow(samples.col(j).norm(), q);
  return acc / static_cast<double>(samples.cols());
}

}  // namespace htopt
