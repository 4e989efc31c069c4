// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "htopt/core.hpp"
#include "htopt/estimators.hpp"

namespace htopt {

enum class StepSchedule { kConstant, kWarmupCosine };

inline const char* to_string(StepSchedule s) {
  switch (s) {
    case StepSchedule::kConstant: return "constant";
    case StepSchedule::kWarmupCosine: return "warmup-cosine";
  }
  throw std::logic_error("unknown schedule");
}

inline StepSchedule schedule_from_string(const std::string& s) {
  if (s == "constant") return StepSchedule::kConstant;
  if (s == "warmup-cosine") return StepSchedule::kWarmupCosine;
  throw std::invalid_argument("unknown schedule '" + s + "'");
}

struct OptimizerConfig {
  EstimatorConfig estimator;
  double eta = 0.01;  // step size (peak value under warmup-cosine)
  StepSchedule schedule = StepSchedule::kConstant;
  int steps = 2000;           // iterations T
  double momentum = 0.0;      // mu in [0, 1)
  double weight_decay = 0.0;  // lambda >= 0
  int warmup_steps = 500;     // linear ramp length under warmup-cosine
  double floor_fraction = 0.1;  // cosine floor as a fraction of eta
  // When set, reject any schedule whose peak step size reaches 1/L; the
  // pathwise descent guarantee needs eta_t < 1/L.
  bool enforce_step_limit = false;

  void validate() const {
    estimator.validate();
    if (!(eta > 0.0)) throw std::invalid_argument("optimizer.eta must be > 0");
    if (steps < 1) throw std::invalid_argument("optimizer.steps must be >= 1");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("optimizer.momentum must lie in [0, 1)");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("optimizer.weight_decay must be >= 0");
    if (warmup_steps < 1) throw std::invalid_argument("optimizer.warmup_steps must be >= 1");
    if (!(floor_fraction >= 0.0 && floor_fraction <= 1.0))
      throw std::invalid_argument("optimizer.floor_fraction must lie in [0, 1]");
  }
};

// Step size at 1-based iteration t. Warmup-cosine ramps linearly to eta over
// warmup_steps, then decays along a half cosine to floor_fraction * eta at
// t = steps; the peak never exceeds eta.
inline double step_size(const OptimizerConfig& opt, int t) {
  if (t < 1 || t > opt.steps) throw std::invalid_argument("step index out of range");
  switch (opt.schedule) {
    case StepSchedule::kConstant:
      return opt.eta;
    case StepSchedule::kWarmupCosine: {
      if (t <= opt.warmup_steps)
        return opt.eta * (static_cast<double>(t) / static_cast<double>(opt.warmup_steps));
      if (opt.steps <= opt.warmup_steps) return opt.eta;
      const double floor = opt.floor_fraction * opt.eta;
      const double progress =
          static_cast<double>(t - opt.warmup_steps) / static_cast<double>(opt.steps - opt.warmup_steps);
      return floor + (opt.eta - floor) * 0.5 * (1.0 + std::cos(progress * std::numbers::pi));
    }
  }
  throw std::logic_error("unknown schedule");
}

struct IterationRecord {
  double eta = 0.0;             // step size used this iteration
  double true_grad_norm = 0.0;  // |grad F(x_t)| before the update
  double est_error = 0.0;       // |grad F(x_t) - G_t|, G_t the raw estimate
  double objective = 0.0;       // F(x_t)
  int clipped_count = 0;        // sample-equivalents clipped this iteration
};

struct RunTrace {
  std::vector<IterationRecord> iterations;
  Vector x1;
  Vector x_final;
  double delta1 = 0.0;  // initial optimality gap
  SeedSpec seed;
};

enum class ClipPlacement { kPerMicroBatch, kPostAccumulation };

inline const char* to_string(ClipPlacement p) {
  switch (p) {
    case ClipPlacement::kPerMicroBatch: return "per-micro-batch";
    case ClipPlacement::kPostAccumulation: return "post-accumulation";
  }
  throw std::logic_error("unknown placement");
}

inline ClipPlacement placement_from_string(const std::string& s) {
  if (s == "per-micro-batch") return ClipPlacement::kPerMicroBatch;
  if (s == "post-accumulation") return ClipPlacement::kPostAccumulation;
  throw std::invalid_argument("unknown clip placement '" + s + "'");
}

struct AccumulationConfig {
  int micro_batch = 8;  // samples per micro-batch (m)
  int steps = 8;        // micro-batches accumulated per update (k)
  ClipPlacement placement = ClipPlacement::kPerMicroBatch;
  double gamma = 1.0;   // clip threshold for micro-batch means / the total mean

  void validate() const {
    if (micro_batch < 1) throw std::invalid_argument("accum.m must be >= 1");
    if (steps < 1) throw std::invalid_argument("accum.k must be >= 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("accum.gamma must be > 0");
  }
};

// One accumulated update direction from k micro-batches of m gradients laid
// out contiguously as columns (micro-batch j owns columns j*m .. j*m+m-1).
// post-accumulation clips the overall mean: identical, bit for bit, to
// global_clip_estimate on the flat batch. per-micro-batch derives one factor
// from each micro-batch mean and applies it to that micro-batch's raw
// gradients inside the same flat sum, so inactive thresholds reproduce the
// post-accumulation result exactly.
inline EstimateResult accumulated_estimate(const Eigen::Ref<const Matrix>& grads, int micro_batch,
                                           int steps, ClipPlacement placement, double gamma) {
  if (micro_batch < 1 || steps < 1) throw std::invalid_argument("accumulation shape must be positive");
  if (grads.cols() != static_cast<Eigen::Index>(micro_batch) * steps)
    throw std::invalid_argument("gradient batch does not match micro_batch * steps");
  if (placement == ClipPlacement::kPostAccumulation) return global_clip_estimate(grads, gamma);

  const Eigen::Index total = grads.cols();
  EstimateResult res;
  res.per_sample_factors.resize(static_cast<std::size_t>(total));
  std::vector<double> micro_factor(static_cast<std::size_t>(steps));
  Vector mean = Vector::Zero(grads.rows());
  for (int j = 0; j < steps; ++j) {
    mean.setZero();
    for (int i = j * micro_batch; i < (j + 1) * micro_batch; ++i) mean += grads.col(i);
    mean /= static_cast<double>(micro_batch);
    micro_factor[static_cast<std::size_t>(j)] = clip_factor(mean, gamma);
    if (micro_factor[static_cast<std::size_t>(j)] < 1.0) res.clipped_count += micro_batch;
  }
  Vector acc = Vector::Zero(grads.rows());
  for (Eigen::Index i = 0; i < total; ++i) {
    const double f = micro_factor[static_cast<std::size_t>(i / micro_batch)];
    res.per_sample_factors[static_cast<std::size_t>(i)] = f;
    acc += f * grads.col(i);
  }
  res.estimate = acc / static_cast<double>(total);
  return res;
}

namespace detail {

// Shared optimizer loop. DrawBatch fills the gradient matrix at x for
// iteration t; Estimate maps the matrix to an EstimateResult.
template <class Problem, class DrawBatch, class Estimate>
RunTrace run_loop(const Problem& prob, const OptimizerConfig& opt, const SeedSpec& seed,
                  const Vector& x1, Eigen::Index batch_cols, DrawBatch&& draw_batch,
                  Estimate&& estimate_fn) {
  opt.validate();
  if (x1.size() != prob.dim()) throw std::invalid_argument("x1 dimension mismatch");
  if (opt.enforce_step_limit && !(opt.eta < 1.0 / prob.smoothness()))
    throw std::domain_error("step size must stay below 1/L");

  RngStream stream(seed);
  const int d = prob.dim();
  Matrix grads(d, batch_cols);
  Vector x = x1;
  Vector buffer = Vector::Zero(d);
  Vector direction(d);
  Vector g_true(d);

  RunTrace trace;
  trace.x1 = x1;
  trace.seed = seed;
  trace.delta1 = prob.init_gap(x1);
  trace.iterations.reserve(static_cast<std::size_t>(opt.steps));

  for (int t = 1; t <= opt.steps; ++t) {
    const double eta = step_size(opt, t);
    draw_batch(x, stream, grads);
    EstimateResult est = estimate_fn(grads);
    prob.full_gradient_into(x, g_true);

    IterationRecord rec;
    rec.eta = eta;
    rec.true_grad_norm = g_true.norm();
    rec.est_error = (g_true - est.estimate).norm();
    rec.objective = prob.value(x);
    rec.clipped_count = est.clipped_count;
    trace.iterations.push_back(rec);

    direction = est.estimate;
    if (opt.weight_decay != 0.0) direction += opt.weight_decay * x;
    if (opt.momentum != 0.0) {
      buffer = opt.momentum * buffer + direction;
      direction = buffer;
    }
    x -= eta * direction;
  }
  trace.x_final = x;
  return trace;
}

template <class Problem>
void fill_batch(const Problem& prob, const Vector& x, RngStream& stream, Matrix& grads) {
  for (Eigen::Index k = 0; k < grads.cols(); ++k) {
    auto col = grads.col(k);
    prob.stochastic_gradient_into(x, stream, col);
  }
}

}  // namespace detail

// Stochastic optimization run: at each iteration draw batch_size gradients,
// reduce them with the configured estimator, then apply weight decay,
// momentum (buffer_t = mu * buffer_{t-1} + direction, starting at zero), and
// the step x <- x - eta_t * direction.
template <class Problem>
RunTrace run(const Problem& prob, const OptimizerConfig& opt, const SeedSpec& seed,
             const Vector& x1) {
  return detail::run_loop(
      prob, opt, seed, x1, opt.estimator.batch_size,
      [&prob](const Vector& x, RngStream& stream, Matrix& grads) {
        detail::fill_batch(prob, x, stream, grads);
      },
      [&opt](const Matrix& grads) { return estimate(opt.estimator, grads); });
}

// Gradient-accumulation run: each update consumes k micro-batches of m
// gradients (k*m draws from the same stream, in draw order) reduced by
// accumulated_estimate. The estimator settings inside opt are ignored; the
// accumulation config decides the reduction.
template <class Problem>
RunTrace run_accumulated(const Problem& prob, const AccumulationConfig& accum,
                         const OptimizerConfig& opt, const SeedSpec& seed, const Vector& x1) {
  accum.validate();
  const Eigen::Index total = static_cast<Eigen::Index>(accum.micro_batch) * accum.steps;
  return detail::run_loop(
      prob, opt, seed, x1, total,
      [&prob](const Vector& x, RngStream& stream, Matrix& grads) {
        detail::fill_batch(prob, x, stream, grads);
      },
      [&accum](const Matrix& grads) {
        return accumulated_estimate(grads, accum.micro_batch, accum.steps, accum.placement,
                                    accum.gamma);
      });
}

struct DescentCheck {
  double lhs = 0.0;    // sum_t eta_t |grad F(x_t)|^2
  double rhs = 0.0;    // 2 * delta1 + sum_t eta_t |grad F(x_t) - G_t|^2
  double slack = 0.0;  // rhs - lhs
  bool holds = false;
};

// Pathwise descent inequality for runs whose update is exactly -eta_t * G_t
// with eta_t < 1/L: the step-size-weighted squared gradient norms are
// controlled by twice the initial gap plus the weighted squared estimator
// errors along the same path.
inline DescentCheck check_descent_inequality(const RunTrace& trace, double delta1) {
  if (trace.iterations.empty()) throw std::invalid_argument("descent check needs a non-empty trace");
  if (!(delta1 >= 0.0)) throw std::invalid_argument("delta1 must be >= 0");
  DescentCheck c;
  for (const IterationRecord& rec : trace.iterations) {
    c.lhs += rec.eta * rec.true_grad_norm * rec.true_grad_norm;
    c.rhs += rec.eta * rec.est_error * rec.est_error;
  }
  c.rhs += 2.0 * delta1;
  c.slack = c.rhs - c.lhs;
  c.holds = c.lhs <= c.rhs;
  return c;
}

}  // namespace htopt
