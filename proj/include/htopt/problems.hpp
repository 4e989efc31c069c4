// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <utility>

#include "htopt/core.hpp"
#include "htopt/noise.hpp"

namespace htopt {

// F(x) = 0.5 * |x|^2 with additive stochastic gradient noise:
// grad f(x, xi) = x + xi. Smoothness constant 1, minimum value 0 at x = 0.
class QuadraticProblem {
 public:
  QuadraticProblem(int dim, NoiseModel noise) : dim_(dim), noise_(std::move(noise)) {
    if (dim_ < 1) throw std::invalid_argument("problem dim must be >= 1");
    noise_.validate();
    if (noise_.dim != dim_) throw std::invalid_argument("noise dim must match problem dim");
  }

  int dim() const { return dim_; }
  const NoiseModel& noise() const { return noise_; }
  double smoothness() const { return 1.0; }
  double lower_bound() const { return 0.0; }

  double value(const Eigen::Ref<const Vector>& x) const {
    check_dim(x);
    return 0.5 * x.squaredNorm();
  }

  void full_gradient_into(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
    check_dim(x);
    out = x;
  }

  Vector full_gradient(const Eigen::Ref<const Vector>& x) const {
    check_dim(x);
    return x;
  }

  void stochastic_gradient_into(const Eigen::Ref<const Vector>& x, RngStream& stream,
                                Eigen::Ref<Vector> out) const {
    check_dim(x);
    sample_into(noise_, stream, out);
    out += x;
  }

  Vector stochastic_gradient(const Eigen::Ref<const Vector>& x, RngStream& stream) const {
    Vector g(dim_);
    stochastic_gradient_into(x, stream, g);
    return g;
  }

  // Initial optimality gap F(x1) - inf F.
  double init_gap(const Eigen::Ref<const Vector>& x1) const { return value(x1) - lower_bound(); }

 private:
  void check_dim(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != dim_) throw std::invalid_argument("point dimension mismatch");
  }

  int dim_;
  NoiseModel noise_;
};

}  // namespace htopt
