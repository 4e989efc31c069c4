// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "htopt/core.hpp"
#include "htopt/estimators.hpp"

using namespace htopt;

namespace {

Matrix random_batch(int dim, int n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  RngStream stream(SeedSpec{seed, 0});
  Matrix m(dim, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = stream.uniform(lo, hi);
  return m;
}

bool bitwise_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

}  // namespace

TEST_CASE("estimator mode strings round-trip") {
  CHECK(estimator_mode_from_string("plain-mean") == EstimatorMode::kPlainMean);
  CHECK(estimator_mode_from_string("ps-clip-increasing") == EstimatorMode::kPsClipIncreasing);
  CHECK(estimator_mode_from_string("ps-clip-constant") == EstimatorMode::kPsClipConstant);
  CHECK(estimator_mode_from_string("global-clip") == EstimatorMode::kGlobalClip);
  CHECK(estimator_mode_from_string("normalize") == EstimatorMode::kNormalize);
  CHECK_THROWS_AS(estimator_mode_from_string("median"), std::invalid_argument);
}

TEST_CASE("clip factor") {
  Vector inside(2), on_edge(2), outside(2);
  inside << 3.0, 4.0;
  on_edge << 3.0, 4.0;
  outside << 6.0, 8.0;
  CHECK(clip_factor(inside, 6.0) == 1.0);
  CHECK(clip_factor(on_edge, 5.0) == 1.0);   // |g| = threshold stays untouched
  CHECK(clip_factor(outside, 5.0) == 0.5);   // 5 / 10, exactly representable
  CHECK(clip_factor(Vector::Zero(2), 1e-30) == 1.0);
}

TEST_CASE("per-sample clipping with growing thresholds: worked example") {
  // Samples (3,4) and (0,1) with alpha = beta = 1: thresholds 1, 2.
  // First sample is scaled by 1/5, second left alone; the mean is
  // ((0.6, 0.8) + (0, 1)) / 2 = (0.3, 0.9).
  Matrix g(2, 2);
  g.col(0) << 3.0, 4.0;
  g.col(1) << 0.0, 1.0;
  const EstimateResult res = ps_clip_estimate(g, 1.0, 1.0);
  CHECK(res.estimate(0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(res.estimate(1) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(res.clipped_count == 1);
  REQUIRE(res.per_sample_factors.size() == 2);
  CHECK(res.per_sample_factors[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(res.per_sample_factors[1] == 1.0);
}

TEST_CASE("per-sample clipping: single sample with square-root growth") {
  Matrix g(2, 1);
  g.col(0) << 6.0, 8.0;
  const EstimateResult res = ps_clip_estimate(g, 1.0, 2.0);  // threshold 1 at k = 1
  CHECK(res.estimate(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(res.estimate(1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(res.clipped_count == 1);
}

TEST_CASE("thresholds use one-based sample indices") {
  // With alpha = 2, beta = 1 the k-th threshold is 2k; a sample of norm 1.5
  // at position 1 (threshold 2) must not be clipped.
  Matrix g(1, 1);
  g(0, 0) = 1.5;
  const EstimateResult res = ps_clip_estimate(g, 2.0, 1.0);
  CHECK(res.estimate(0) == 1.5);
  CHECK(res.clipped_count == 0);
}

TEST_CASE("inactive per-sample clipping reproduces the plain mean bit for bit") {
  const Matrix g = random_batch(5, 8, 101);
  const EstimateResult clip = ps_clip_estimate(g, 100.0, 1.0);  // far above any |g_k|
  const EstimateResult plain = plain_mean(g);
  CHECK(bitwise_equal(clip.estimate, plain.estimate));
  CHECK(clip.clipped_count == 0);
  for (double f : clip.per_sample_factors) CHECK(f == 1.0);
}

TEST_CASE("constant per-sample clipping: worked example and inactive case") {
  Matrix g(2, 1);
  g.col(0) << 6.0, 8.0;
  const EstimateResult res = ps_clip_constant_estimate(g, 5.0);
  CHECK(res.estimate(0) == 3.0);  // factor 1/2 is exact
  CHECK(res.estimate(1) == 4.0);
  CHECK(res.clipped_count == 1);

  const Matrix batch = random_batch(3, 6, 55);
  CHECK(bitwise_equal(ps_clip_constant_estimate(batch, 1e6).estimate, plain_mean(batch).estimate));
}

TEST_CASE("global clipping scales the batch mean") {
  Matrix g(2, 1);
  g.col(0) << 6.0, 8.0;
  const EstimateResult res = global_clip_estimate(g, 5.0);
  CHECK(res.estimate(0) == 3.0);
  CHECK(res.estimate(1) == 4.0);
  CHECK(res.clipped_count == 1);  // the whole (single-sample) batch was clipped

  const Matrix batch = random_batch(4, 7, 77);
  const EstimateResult inactive = global_clip_estimate(batch, 1e6);
  CHECK(bitwise_equal(inactive.estimate, plain_mean(batch).estimate));
  CHECK(inactive.clipped_count == 0);
}

TEST_CASE("global clip counts every sample when the mean is clipped") {
  Matrix g(1, 4);
  g << 10.0, 10.0, 10.0, 10.0;
  const EstimateResult res = global_clip_estimate(g, 1.0);
  CHECK(res.clipped_count == 4);
  CHECK(res.estimate(0) == 1.0);
}

TEST_CASE("normalization rescales the mean to unit length") {
  Matrix g(2, 1);
  g.col(0) << 0.0, 8.0;  // norm is a power of two: exact unit result
  const EstimateResult res = normalize_estimate(g);
  CHECK(res.estimate(0) == 0.0);
  CHECK(res.estimate(1) == 1.0);
  CHECK(res.clipped_count == 0);

  Matrix h(2, 1);
  h.col(0) << 3.0, 4.0;
  const EstimateResult r2 = normalize_estimate(h);
  CHECK(r2.estimate(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(r2.estimate(1) == doctest::Approx(0.8).epsilon(1e-15));

  const Matrix batch = random_batch(6, 9, 31);
  CHECK(norm(normalize_estimate(batch).estimate) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact cancellation leaves the zero vector alone") {
  Matrix g(2, 2);
  g.col(0) << 1.0, 0.0;
  g.col(1) << -1.0, 0.0;
  CHECK(normalize_estimate(g).estimate.isZero(0.0));
  CHECK(global_clip_estimate(g, 1.0).estimate.isZero(0.0));
  CHECK(plain_mean(g).estimate.isZero(0.0));
}

TEST_CASE("dispatch by config matches the direct calls bit for bit") {
  const Matrix g = random_batch(3, 5, 2023, -3.0, 3.0);
  EstimatorConfig cfg;
  cfg.alpha = 0.8;
  cfg.beta = 1.5;
  cfg.gamma = 0.9;
  cfg.batch_size = 5;

  cfg.mode = EstimatorMode::kPlainMean;
  CHECK(bitwise_equal(estimate(cfg, g).estimate, plain_mean(g).estimate));
  cfg.mode = EstimatorMode::kPsClipIncreasing;
  CHECK(bitwise_equal(estimate(cfg, g).estimate, ps_clip_estimate(g, 0.8, 1.5).estimate));
  cfg.mode = EstimatorMode::kPsClipConstant;
  CHECK(bitwise_equal(estimate(cfg, g).estimate, ps_clip_constant_estimate(g, 0.9).estimate));
  cfg.mode = EstimatorMode::kGlobalClip;
  CHECK(bitwise_equal(estimate(cfg, g).estimate, global_clip_estimate(g, 0.9).estimate));
  cfg.mode = EstimatorMode::kNormalize;
  CHECK(bitwise_equal(estimate(cfg, g).estimate, normalize_estimate(g).estimate));
}

TEST_CASE("per-sample factors never exceed one and shrink with smaller alpha") {
  const Matrix g = random_batch(4, 12, 808, -5.0, 5.0);
  const EstimateResult tight = ps_clip_estimate(g, 0.1, 1.2);
  const EstimateResult loose = ps_clip_estimate(g, 1.0, 1.2);
  REQUIRE(tight.per_sample_factors.size() == loose.per_sample_factors.size());
  for (std::size_t k = 0; k < tight.per_sample_factors.size(); ++k) {
    CHECK(tight.per_sample_factors[k] > 0.0);
    CHECK(tight.per_sample_factors[k] <= 1.0);
    CHECK(tight.per_sample_factors[k] <= loose.per_sample_factors[k]);
  }
  CHECK(tight.clipped_count >= loose.clipped_count);
}

TEST_CASE("confidence-tuned clip scale") {
  // ln(1/delta) + 1/4 = 1 at delta = e^(-3/4), so the scale equals sigma.
  const double delta = std::exp(-0.75);
  CHECK(alpha_for_confidence(2.0, 1.5, delta) == doctest::Approx(2.0).epsilon(1e-14));
  // At p = 2 and delta = 1/e the denominator is sqrt(1.25).
  CHECK(alpha_for_confidence(1.0, 2.0, std::exp(-1.0)) ==
        doctest::Approx(0.8944271909999159).epsilon(1e-14));
  // As delta approaches 1 the scale tends to sigma / (1/4)^(1/p) = 2 sigma at p = 2.
  CHECK(alpha_for_confidence(1.0, 2.0, 1.0 - 1e-12) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK_THROWS_AS(alpha_for_confidence(1.0, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_for_confidence(1.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_for_confidence(-1.0, 2.0, 0.5), std::invalid_argument);
}

TEST_CASE("estimator config validation") {
  EstimatorConfig cfg;
  cfg.beta = 2.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.beta = 1.0;
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.alpha = 1.0;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
