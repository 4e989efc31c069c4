// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace htopt {

// Inputs shared by the closed-form guarantee calculators. All logs are
// natural logs. The calculators are pure and fail loudly on out-of-range
// inputs instead of clamping.
struct BoundInputs {
  double delta1 = 1.0;      // initial optimality gap (objective units), >= 0
  double smoothness = 1.0;  // gradient Lipschitz constant L, > 0
  double sigma = 1.0;       // p-th central moment scale: E|noise|^p <= sigma^p
  double p = 2.0;           // moment order in (1, 2]
  long long steps = 1;      // iteration count T, >= 1
  long long batch = 1;      // per-iteration sample count n, >= 1
  double delta = 0.5;       // confidence parameter in (0, 1)
  // Per-iteration step sizes; empty means the constant 1/(2L) schedule.
  std::vector<double> etas;

  void validate() const {
    if (!(delta1 >= 0.0)) throw std::invalid_argument("delta1 must be >= 0");
    if (!(smoothness > 0.0)) throw std::invalid_argument("smoothness must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (!(p > 1.0 && p <= 2.0)) throw std::invalid_argument("p must lie in (1, 2]");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (batch < 1) throw std::invalid_argument("batch must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (!etas.empty()) {
      if (static_cast<long long>(etas.size()) != steps)
        throw std::invalid_argument("eta list length must equal steps");
      for (double e : etas)
        if (!(e > 0.0)) throw std::invalid_argument("step sizes must be > 0");
    }
  }
};

namespace detail {

inline double sum_etas(const BoundInputs& in) {
  if (in.etas.empty()) return static_cast<double>(in.steps) * (0.5 / in.smoothness);
  return std::accumulate(in.etas.begin(), in.etas.end(), 0.0);
}

inline void require_below_inverse_smoothness(const BoundInputs& in) {
  const double limit = 1.0 / in.smoothness;
  if (in.etas.empty()) return;  // 1/(2L) < 1/L always
  for (double e : in.etas)
    if (!(e < limit)) throw std::domain_error("step sizes must stay below 1/L");
}

inline void require_half_inverse_smoothness(const BoundInputs& in) {
  const double eta = 0.5 / in.smoothness;
  if (in.etas.empty()) return;
  for (double e : in.etas)
    if (std::abs(e - eta) > 1e-12 * eta)
      throw std::domain_error("this guarantee assumes the constant 1/(2L) step size");
}

}  // namespace detail

// Guarantee on the step-size-weighted average of E|grad F(x_t)|^2 for the
// increasing-threshold per-sample estimator tuned to (sigma, p):
// 2*delta1/sum(eta) + 8*sigma^2 * n^(-2(p-1)/p).  JSON key: "thm1".
inline double expected_bound(const BoundInputs& in) {
  in.validate();
  detail::require_below_inverse_smoothness(in);
  const double tail =
      8.0 * in.sigma * in.sigma * std::pow(static_cast<double>(in.batch), -2.0 * (in.p - 1.0) / in.p);
  return 2.0 * in.delta1 / detail::sum_etas(in) + tail;
}

// Batch size that balances the two terms of expected_bound under the
// constant 1/(2L) schedule: ceil(max(1, (sigma^2 T / (delta1 L))^(p/(2(p-1))))).
// JSON key: "cor1_n".
inline long long recommended_batch(const BoundInputs& in) {
  in.validate();
  if (!(in.delta1 > 0.0)) throw std::domain_error("recommended batch needs delta1 > 0");
  const double ratio = in.sigma * in.sigma * static_cast<double>(in.steps) / (in.delta1 * in.smoothness);
  const double raw = std::pow(ratio, in.p / (2.0 * (in.p - 1.0)));
  if (raw <= 1.0) return 1;
  if (!(raw < 9e15)) throw std::domain_error("recommended batch exceeds the representable range");
  // Shave one part in 1e12 so values that are mathematically integers do not
  // get bumped up by floating-point residue.
  return static_cast<long long>(std::ceil(raw * (1.0 - 1e-12)));
}

// Rate achieved with the recommended batch and the constant 1/(2L) schedule:
// 9 * delta1 * L / T.  JSON key: "cor1".
inline double expected_rate_bound(const BoundInputs& in) {
  in.validate();
  detail::require_half_inverse_smoothness(in);
  return 9.0 * in.delta1 * in.smoothness / static_cast<double>(in.steps);
}

// High-probability analogue of expected_bound, valid with probability at
// least 1 - delta:
// 2*delta1/sum(eta) + 49*sigma^2 * ((ln(1/delta) + ln T + 1/4)/n)^(2(p-1)/p).
// JSON key: "thm2".
inline double high_prob_bound(const BoundInputs& in) {
  in.validate();
  detail::require_below_inverse_smoothness(in);
  const double inner =
      (std::log(1.0 / in.delta) + std::log(static_cast<double>(in.steps)) + 0.25) /
      static_cast<double>(in.batch);
  return 2.0 * in.delta1 / detail::sum_etas(in) +
         49.0 * in.sigma * in.sigma * std::pow(inner, 2.0 * (in.p - 1.0) / in.p);
}

// High-probability rate at the recommended batch size:
// (3 + 49(ln(1/delta) + ln T))^(2(p-1)/p) * delta1 * L / T.  JSON key: "cor2".
inline double high_prob_rate_bound(const BoundInputs& in) {
  in.validate();
  if (in.batch != recommended_batch(in))
    throw std::domain_error("this guarantee assumes the recommended batch size");
  const double factor = 3.0 + 49.0 * (std::log(1.0 / in.delta) + std::log(static_cast<double>(in.steps)));
  return std::pow(factor, 2.0 * (in.p - 1.0) / in.p) * in.delta1 * in.smoothness /
         static_cast<double>(in.steps);
}

// Coarser delta-robust variant of high_prob_rate_bound with the exponent
// replaced by 2; only valid for delta <= e^(-3/4).  JSON key: "remark".
inline double squared_log_rate_bound(const BoundInputs& in) {
  in.validate();
  if (!(in.delta <= std::exp(-0.75)))
    throw std::domain_error("squared-log rate bound requires delta <= e^(-3/4)");
  if (in.batch != recommended_batch(in))
    throw std::domain_error("this guarantee assumes the recommended batch size");
  const double factor = 3.0 + 49.0 * (std::log(1.0 / in.delta) + std::log(static_cast<double>(in.steps)));
  return factor * factor * in.delta1 * in.smoothness / static_cast<double>(in.steps);
}

// Tail bound for the deviation of a mean of n bounded (|X| <= c) zero-mean
// vectors with E|X|^2 <= sigma2:
// P(|mean| > eps) <= exp(-n eps^2 / (8 sigma2 + c eps) + 1/4).
inline double bernstein_tail(double n, double eps, double c, double sigma2) {
  if (!(n > 0.0)) throw std::invalid_argument("n must be > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (!(c >= 0.0)) throw std::invalid_argument("c must be >= 0");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
  return std::exp(-n * eps * eps / (8.0 * sigma2 + c * eps) + 0.25);
}

}  // namespace htopt
