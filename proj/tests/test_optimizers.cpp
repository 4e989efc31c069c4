// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "htopt/core.hpp"
#include "htopt/estimators.hpp"
#include "htopt/noise.hpp"
#include "htopt/optimizers.hpp"
#include "htopt/problems.hpp"

using namespace htopt;

namespace {

NoiseModel no_noise(int dim) {
  NoiseModel nm;
  nm.kind = NoiseKind::kNone;
  nm.dim = dim;
  return nm;
}

NoiseModel pareto(int dim, double tail_index) {
  NoiseModel nm;
  nm.kind = NoiseKind::kSymmetrizedPareto;
  nm.dim = dim;
  nm.tail_index = tail_index;
  nm.scale = 1.0;
  return nm;
}

bool bitwise_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

OptimizerConfig basic_opt(EstimatorMode mode, double eta, int steps, int batch) {
  OptimizerConfig opt;
  opt.estimator.mode = mode;
  opt.eta = eta;
  opt.steps = steps;
  opt.estimator.batch_size = batch;
  return opt;
}

}  // namespace

TEST_CASE("constant schedule returns eta at every step") {
  OptimizerConfig opt = basic_opt(EstimatorMode::kPlainMean, 0.3, 10, 1);
  for (int t = 1; t <= 10; ++t) CHECK(step_size(opt, t) == 0.3);
  CHECK_THROWS_AS(step_size(opt, 0), std::invalid_argument);
  CHECK_THROWS_AS(step_size(opt, 11), std::invalid_argument);
}

TEST_CASE("warmup-cosine ramps, peaks at eta, and decays to the floor") {
  OptimizerConfig opt = basic_opt(EstimatorMode::kPlainMean, 1.0, 30, 1);
  opt.schedule = StepSchedule::kWarmupCosine;
  opt.warmup_steps = 10;
  opt.floor_fraction = 0.1;
  CHECK(step_size(opt, 1) == doctest::Approx(0.1).epsilon(1e-15));  // 1/10 of the peak
  CHECK(step_size(opt, 10) == 1.0);
  CHECK(step_size(opt, 30) == doctest::Approx(0.1).epsilon(1e-12));
  double peak = 0.0;
  for (int t = 1; t <= 30; ++t) {
    const double s = step_size(opt, t);
    CHECK(s > 0.0);
    peak = std::max(peak, s);
    CHECK(s <= 1.0 + 1e-15);
  }
  CHECK(peak == 1.0);
}

TEST_CASE("noiseless plain-mean run contracts geometrically") {
  const int dim = 3, steps = 50;
  const double eta = 0.1;
  const QuadraticProblem prob(dim, no_noise(dim));
  Vector x1(dim);
  x1 << 1.0, -2.0, 0.5;
  const RunTrace trace =
      run(prob, basic_opt(EstimatorMode::kPlainMean, eta, steps, 1), SeedSpec{1, 0}, x1);
  REQUIRE(trace.iterations.size() == 50);
  CHECK(trace.iterations[0].true_grad_norm == doctest::Approx(norm(x1)).epsilon(1e-15));
  CHECK(trace.iterations[0].objective == doctest::Approx(0.5 * norm(x1) * norm(x1)).epsilon(1e-15));
  // |x_t| = |x1| (1 - eta)^(t-1); the last recorded point is t = 50.
  CHECK(trace.iterations[49].true_grad_norm ==
        doctest::Approx(norm(x1) * std::pow(0.9, 49)).epsilon(1e-12));
  CHECK(norm(trace.x_final) == doctest::Approx(norm(x1) * std::pow(0.9, 50)).epsilon(1e-12));
  CHECK(trace.delta1 == doctest::Approx(0.5 * norm(x1) * norm(x1)).epsilon(1e-15));
  // Noiseless estimates are exact, so the recorded estimator error is zero.
  for (const IterationRecord& rec : trace.iterations) CHECK(rec.est_error == 0.0);
}

TEST_CASE("the recorded estimator error is taken before decay and momentum") {
  const QuadraticProblem prob(2, no_noise(2));
  Vector x1(2);
  x1 << 0.7, -0.4;
  OptimizerConfig opt = basic_opt(EstimatorMode::kPlainMean, 0.05, 20, 1);
  opt.weight_decay = 0.5;
  opt.momentum = 0.9;
  const RunTrace trace = run(prob, opt, SeedSpec{3, 0}, x1);
  for (const IterationRecord& rec : trace.iterations) CHECK(rec.est_error == 0.0);
}

TEST_CASE("momentum and weight decay replay the documented update order") {
  const int dim = 2, steps = 25;
  NoiseModel nm = pareto(dim, 1.7);
  const QuadraticProblem prob(dim, nm);
  Vector x1(dim);
  x1 << 0.3, 0.9;
  OptimizerConfig opt = basic_opt(EstimatorMode::kPlainMean, 0.05, steps, 1);
  opt.momentum = 0.9;
  opt.weight_decay = 0.01;
  const RunTrace trace = run(prob, opt, SeedSpec{88, 4}, x1);

  // Manual replay: batch of one sample, so the estimate is exactly x + noise.
  RngStream stream(SeedSpec{88, 4});
  Vector x = x1, buffer = Vector::Zero(dim), g(dim), direction(dim);
  for (int t = 0; t < steps; ++t) {
    prob.stochastic_gradient_into(x, stream, g);
    direction = g;
    direction += opt.weight_decay * x;
    buffer = opt.momentum * buffer + direction;
    direction = buffer;
    x -= opt.eta * direction;
  }
  CHECK(bitwise_equal(trace.x_final, x));
}

TEST_CASE("zero momentum and zero decay change nothing in the update") {
  const int dim = 3, steps = 15;
  const QuadraticProblem prob(dim, pareto(dim, 1.5));
  Vector x1(dim);
  x1 << 0.1, -0.2, 0.4;
  OptimizerConfig plain = basic_opt(EstimatorMode::kPlainMean, 0.02, steps, 2);
  OptimizerConfig zeroed = plain;
  zeroed.momentum = 0.0;
  zeroed.weight_decay = 0.0;
  const RunTrace a = run(prob, plain, SeedSpec{5, 1}, x1);
  const RunTrace b = run(prob, zeroed, SeedSpec{5, 1}, x1);
  CHECK(bitwise_equal(a.x_final, b.x_final));
}

TEST_CASE("inactive per-sample thresholds make the run identical to plain mean") {
  const int dim = 3, steps = 30;
  const QuadraticProblem prob(dim, pareto(dim, 1.5));
  Vector x1(dim);
  x1 << 0.5, 0.5, -0.5;
  OptimizerConfig clip = basic_opt(EstimatorMode::kPsClipIncreasing, 0.02, steps, 4);
  clip.estimator.alpha = 1e9;
  OptimizerConfig plain = basic_opt(EstimatorMode::kPlainMean, 0.02, steps, 4);
  const RunTrace a = run(prob, clip, SeedSpec{42, 0}, x1);
  const RunTrace b = run(prob, plain, SeedSpec{42, 0}, x1);
  CHECK(bitwise_equal(a.x_final, b.x_final));
  for (std::size_t t = 0; t < a.iterations.size(); ++t) {
    CHECK(a.iterations[t].true_grad_norm == b.iterations[t].true_grad_norm);
    CHECK(a.iterations[t].est_error == b.iterations[t].est_error);
    CHECK(a.iterations[t].clipped_count == 0);
  }
}

TEST_CASE("normalized steps move exactly eta per iteration") {
  const int dim = 2;
  const QuadraticProblem prob(dim, no_noise(dim));
  Vector x1(dim);
  x1 << 1.0, 1.0;
  OptimizerConfig opt = basic_opt(EstimatorMode::kNormalize, 0.01, 5, 1);
  const RunTrace trace = run(prob, opt, SeedSpec{6, 0}, x1);
  // Every update is a unit direction scaled by eta along the same ray.
  CHECK(norm(trace.x_final - x1) == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("accumulated reduction: per-micro-batch worked example") {
  // Micro-batches {(6,8)} and {(0,1)} with threshold 5: factors 1/2 and 1.
  Matrix g(2, 2);
  g.col(0) << 6.0, 8.0;
  g.col(1) << 0.0, 1.0;
  const EstimateResult res = accumulated_estimate(g, 1, 2, ClipPlacement::kPerMicroBatch, 5.0);
  CHECK(res.estimate(0) == 1.5);  // all arithmetic dyadic, hence exact
  CHECK(res.estimate(1) == 2.5);
  CHECK(res.clipped_count == 1);
  REQUIRE(res.per_sample_factors.size() == 2);
  CHECK(res.per_sample_factors[0] == 0.5);
  CHECK(res.per_sample_factors[1] == 1.0);
}

TEST_CASE("accumulated reduction: post-accumulation worked example") {
  // Overall mean (3, 4.5) has norm sqrt(29.25) > 5; the clipped mean is
  // 5 / sqrt(29.25) * (3, 4.5).
  Matrix g(2, 2);
  g.col(0) << 6.0, 8.0;
  g.col(1) << 0.0, 1.0;
  const EstimateResult res = accumulated_estimate(g, 1, 2, ClipPlacement::kPostAccumulation, 5.0);
  CHECK(res.estimate(0) == doctest::Approx(2.773500981126145).epsilon(1e-15));
  CHECK(res.estimate(1) == doctest::Approx(4.160251471689218).epsilon(1e-15));
  CHECK(res.clipped_count == 2);
}

TEST_CASE("post-accumulation is the global clip of the flat batch, bit for bit") {
  RngStream stream(SeedSpec{17, 0});
  Matrix g(4, 12);
  for (int j = 0; j < 12; ++j)
    for (int i = 0; i < 4; ++i) g(i, j) = stream.uniform(-4.0, 4.0);
  const EstimateResult post = accumulated_estimate(g, 3, 4, ClipPlacement::kPostAccumulation, 0.5);
  const EstimateResult global = global_clip_estimate(g, 0.5);
  CHECK(bitwise_equal(post.estimate, global.estimate));
  CHECK(post.clipped_count == global.clipped_count);
}

TEST_CASE("single micro-batch clipping agrees with global clipping to rounding") {
  RngStream stream(SeedSpec{18, 0});
  Matrix g(3, 5);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 3; ++i) g(i, j) = stream.uniform(-4.0, 4.0);
  const EstimateResult micro = accumulated_estimate(g, 5, 1, ClipPlacement::kPerMicroBatch, 0.3);
  const EstimateResult global = global_clip_estimate(g, 0.3);
  for (int i = 0; i < 3; ++i)
    CHECK(micro.estimate(i) == doctest::Approx(global.estimate(i)).epsilon(1e-14));
}

TEST_CASE("inactive accumulation thresholds collapse both placements to the plain mean") {
  RngStream stream(SeedSpec{19, 0});
  Matrix g(3, 8);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 3; ++i) g(i, j) = stream.uniform(-1.0, 1.0);
  const EstimateResult micro = accumulated_estimate(g, 2, 4, ClipPlacement::kPerMicroBatch, 1e9);
  const EstimateResult post = accumulated_estimate(g, 2, 4, ClipPlacement::kPostAccumulation, 1e9);
  const EstimateResult plain = plain_mean(g);
  CHECK(bitwise_equal(micro.estimate, plain.estimate));
  CHECK(bitwise_equal(post.estimate, plain.estimate));
  CHECK(micro.clipped_count == 0);
  CHECK(post.clipped_count == 0);
}

TEST_CASE("accumulated run with post placement equals a global-clip run on the flat batch") {
  const int dim = 3;
  const QuadraticProblem prob(dim, pareto(dim, 1.4));
  Vector x1(dim);
  x1 << 0.4, -0.1, 0.2;

  AccumulationConfig accum;
  accum.micro_batch = 3;
  accum.steps = 4;
  accum.placement = ClipPlacement::kPostAccumulation;
  accum.gamma = 0.5;

  OptimizerConfig opt = basic_opt(EstimatorMode::kGlobalClip, 0.05, 20, 12);
  opt.estimator.gamma = 0.5;

  const RunTrace a = run_accumulated(prob, accum, opt, SeedSpec{23, 2}, x1);
  const RunTrace b = run(prob, opt, SeedSpec{23, 2}, x1);
  CHECK(bitwise_equal(a.x_final, b.x_final));
  for (std::size_t t = 0; t < a.iterations.size(); ++t) {
    CHECK(a.iterations[t].true_grad_norm == b.iterations[t].true_grad_norm);
    CHECK(a.iterations[t].est_error == b.iterations[t].est_error);
    CHECK(a.iterations[t].clipped_count == b.iterations[t].clipped_count);
  }
}

TEST_CASE("descent inequality holds pathwise") {
  const int dim = 4;
  Vector x1(dim);
  x1 << 1.0, -1.0, 0.5, 0.25;

  SUBCASE("noiseless run") {
    const QuadraticProblem prob(dim, no_noise(dim));
    OptimizerConfig opt = basic_opt(EstimatorMode::kPlainMean, 0.25, 40, 1);
    opt.enforce_step_limit = true;
    const RunTrace trace = run(prob, opt, SeedSpec{1, 0}, x1);
    const DescentCheck check = check_descent_inequality(trace, trace.delta1);
    CHECK(check.holds);
    CHECK(check.slack >= 0.0);
  }

  SUBCASE("heavy-tailed runs across seeds and modes") {
    const QuadraticProblem prob(dim, pareto(dim, 1.5));
    for (const EstimatorMode mode :
         {EstimatorMode::kPsClipIncreasing, EstimatorMode::kNormalize, EstimatorMode::kGlobalClip}) {
      for (std::uint64_t r = 0; r < 10; ++r) {
        OptimizerConfig opt = basic_opt(mode, 0.25, 60, 8);
        opt.enforce_step_limit = true;
        const RunTrace trace = run(prob, opt, SeedSpec{99, r}, x1);
        const DescentCheck check = check_descent_inequality(trace, trace.delta1);
        CHECK(check.slack >= -1e-9);
        CHECK(check.holds);
      }
    }
  }
}

TEST_CASE("step-limit enforcement rejects step sizes that reach 1/L") {
  const QuadraticProblem prob(2, no_noise(2));
  Vector x1(2);
  x1 << 1.0, 1.0;
  OptimizerConfig opt = basic_opt(EstimatorMode::kPlainMean, 1.5, 5, 1);
  opt.enforce_step_limit = true;
  CHECK_THROWS_AS(run(prob, opt, SeedSpec{1, 0}, x1), std::domain_error);
  opt.eta = 1.0;  // exactly 1/L is still too large
  CHECK_THROWS_AS(run(prob, opt, SeedSpec{1, 0}, x1), std::domain_error);
  opt.eta = 0.999;
  CHECK_NOTHROW(run(prob, opt, SeedSpec{1, 0}, x1));
  opt.enforce_step_limit = false;
  opt.eta = 1.5;
  CHECK_NOTHROW(run(prob, opt, SeedSpec{1, 0}, x1));
}

TEST_CASE("descent check input validation") {
  CHECK_THROWS_AS(check_descent_inequality(RunTrace{}, 1.0), std::invalid_argument);
  const QuadraticProblem prob(2, no_noise(2));
  Vector x1(2);
  x1 << 1.0, 0.0;
  const RunTrace trace = run(prob, basic_opt(EstimatorMode::kPlainMean, 0.1, 3, 1), SeedSpec{1, 0}, x1);
  CHECK_THROWS_AS(check_descent_inequality(trace, -1.0), std::invalid_argument);
}

TEST_CASE("optimizer config validation") {
  OptimizerConfig opt;
  opt.eta = 0.0;
  CHECK_THROWS_AS(opt.validate(), std::invalid_argument);
  opt.eta = 0.1;
  opt.momentum = 1.0;
  CHECK_THROWS_AS(opt.validate(), std::invalid_argument);
  opt.momentum = 0.0;
  opt.steps = 0;
  CHECK_THROWS_AS(opt.validate(), std::invalid_argument);
}
