// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "htopt/core.hpp"

namespace htopt {

enum class EstimatorMode {
  kPlainMean,         // unclipped batch mean
  kPsClipIncreasing,  // per-sample clipping at alpha * k^(1/beta)
  kPsClipConstant,    // per-sample clipping at a fixed gamma
  kGlobalClip,        // clip the batch mean at gamma
  kNormalize,         // scale the batch mean to unit norm
};

inline const char* to_string(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::kPlainMean: return "plain-mean";
    case EstimatorMode::kPsClipIncreasing: return "ps-clip-increasing";
    case EstimatorMode::kPsClipConstant: return "ps-clip-constant";
    case EstimatorMode::kGlobalClip: return "global-clip";
    case EstimatorMode::kNormalize: return "normalize";
  }
  throw std::logic_error("unknown estimator mode");
}

inline EstimatorMode estimator_mode_from_string(const std::string& s) {
  if (s == "plain-mean") return EstimatorMode::kPlainMean;
  if (s == "ps-clip-increasing") return EstimatorMode::kPsClipIncreasing;
  if (s == "ps-clip-constant") return EstimatorMode::kPsClipConstant;
  if (s == "global-clip") return EstimatorMode::kGlobalClip;
  if (s == "normalize") return EstimatorMode::kNormalize;
  throw std::invalid_argument("unknown estimator mode '" + s + "'");
}

struct EstimatorConfig {
  EstimatorMode mode = EstimatorMode::kPsClipIncreasing;
  double alpha = 1.0;  // per-sample clip scale
  double beta = 1.0;   // threshold growth exponent: sample k is clipped at alpha * k^(1/beta)
  double gamma = 1.0;  // fixed threshold for ps-clip-constant and global-clip
  int batch_size = 64;

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("estimator.alpha must be > 0");
    // beta = 1 is the untuned-benchmark boundary; beta = p in the tuned regime.
    if (!(beta >= 1.0 && beta <= 2.0)) throw std::invalid_argument("estimator.beta must lie in [1, 2]");
    if (!(gamma > 0.0)) throw std::invalid_argument("estimator.gamma must be > 0");
    if (batch_size < 1) throw std::invalid_argument("estimator.batch_size must be >= 1");
  }
};

struct EstimateResult {
  Vector estimate;
  // Scale factor applied to each sample, in batch order. Clipping factors lie
  // in (0, 1]; the normalize mode stores the uniform 1/|mean| rescale instead.
  std::vector<double> per_sample_factors;
  // Sample-equivalents that were actually clipped: per-sample modes count
  // samples, global-clip counts the whole batch when its mean is clipped, and
  // accumulation counts micro_batch per clipped micro-batch. Zero for
  // plain-mean and normalize.
  int clipped_count = 0;
};

// Factor in (0, 1] that rescales g onto the ball of radius threshold.
// Gradients already inside the ball (including zero) are left untouched.
inline double clip_factor(const Eigen::Ref<const Vector>& g, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("clip threshold must be > 0");
  const double n = g.norm();
  return n <= threshold ? 1.0 : threshold / n;
}

namespace detail {

inline void check_batch(const Eigen::Ref<const Matrix>& grads) {
  if (grads.cols() < 1) throw std::invalid_argument("gradient batch is empty");
}

}  // namespace detail

// Note on floating point: every batch reduction below accumulates columns in
// batch order into one running sum and divides once at the end. Paths that
// apply a factor of exactly 1.0 are therefore bit-identical to the unclipped
// mean, which the optimizer equivalence tests rely on.

// Mean of the batch with sample k clipped at alpha * k^(1/beta) (k 1-based).
inline EstimateResult ps_clip_estimate(const Eigen::Ref<const Matrix>& grads, double alpha,
                                       double beta) {
  detail::check_batch(grads);
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  const Eigen::Index n = grads.cols();
  EstimateResult res;
  res.per_sample_factors.resize(static_cast<std::size_t>(n));
  Vector acc = Vector::Zero(grads.rows());
  const double inv_beta = 1.0 / beta;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double threshold = alpha * std::pow(static_cast<double>(k + 1), inv_beta);
    const double f = clip_factor(grads.col(k), threshold);
    res.per_sample_factors[static_cast<std::size_t>(k)] = f;
    if (f < 1.0) ++res.clipped_count;
    acc += f * grads.col(k);
  }
  res.estimate = acc / static_cast<double>(n);
  return res;
}

// Mean of the batch with every sample clipped at the same threshold gamma.
inline EstimateResult ps_clip_constant_estimate(const Eigen::Ref<const Matrix>& grads,
                                                double gamma) {
  detail::check_batch(grads);
  const Eigen::Index n = grads.cols();
  EstimateResult res;
  res.per_sample_factors.resize(static_cast<std::size_t>(n));
  Vector acc = Vector::Zero(grads.rows());
  for (Eigen::Index k = 0; k < n; ++k) {
    const double f = clip_factor(grads.col(k), gamma);
    res.per_sample_factors[static_cast<std::size_t>(k)] = f;
    if (f < 1.0) ++res.clipped_count;
    acc += f * grads.col(k);
  }
  res.estimate = acc / static_cast<double>(n);
  return res;
}

// Unclipped batch mean.
inline EstimateResult plain_mean(const Eigen::Ref<const Matrix>& grads) {
  detail::check_batch(grads);
  const Eigen::Index n = grads.cols();
  EstimateResult res;
  res.per_sample_factors.assign(static_cast<std::size_t>(n), 1.0);
  Vector acc = Vector::Zero(grads.rows());
  for (Eigen::Index k = 0; k < n; ++k) acc += grads.col(k);
  res.estimate = acc / static_cast<double>(n);
  return res;
}

// Batch mean clipped as a whole at gamma.
inline EstimateResult global_clip_estimate(const Eigen::Ref<const Matrix>& grads, double gamma) {
  detail::check_batch(grads);
  const Eigen::Index n = grads.cols();
  EstimateResult res;
  Vector acc = Vector::Zero(grads.rows());
  for (Eigen::Index k = 0; k < n; ++k) acc += grads.col(k);
  const Vector mean = acc / static_cast<double>(n);
  const double c = clip_factor(mean, gamma);
  res.per_sample_factors.assign(static_cast<std::size_t>(n), c);
  res.clipped_count = c < 1.0 ? static_cast<int>(n) : 0;
  res.estimate = c * mean;
  return res;
}

// Batch mean rescaled to unit norm; a zero mean stays zero.
inline EstimateResult normalize_estimate(const Eigen::Ref<const Matrix>& grads) {
  detail::check_batch(grads);
  const Eigen::Index n = grads.cols();
  EstimateResult res;
  Vector acc = Vector::Zero(grads.rows());
  for (Eigen::Index k = 0; k < n; ++k) acc += grads.col(k);
  const Vector mean = acc / static_cast<double>(n);
  const double nm = mean.norm();
  const double f = nm == 0.0 ? 1.0 : 1.0 / nm;
  res.per_sample_factors.assign(static_cast<std::size_t>(n), f);
  res.estimate = f * mean;
  return res;
}

inline EstimateResult estimate(const EstimatorConfig& config, const Eigen::Ref<const Matrix>& grads) {
  switch (config.mode) {
    case EstimatorMode::kPlainMean: return plain_mean(grads);
    case EstimatorMode::kPsClipIncreasing: return ps_clip_estimate(grads, config.alpha, config.beta);
    case EstimatorMode::kPsClipConstant: return ps_clip_constant_estimate(grads, config.gamma);
    case EstimatorMode::kGlobalClip: return global_clip_estimate(grads, config.gamma);
    case EstimatorMode::kNormalize: return normalize_estimate(grads);
  }
  throw std::logic_error("unknown estimator mode");
}

// Per-sample clip scale that turns the increasing-threshold estimator into a
// (1 - delta)-confidence estimator for noise with a p-th moment bound sigma^p.
inline double alpha_for_confidence(double sigma, double p, double delta) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (!(p > 1.0 && p <= 2.0)) throw std::invalid_argument("p must lie in (1, 2]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  return sigma / std::pow(std::log(1.0 / delta) + 0.25, 1.0 / p);
}

}  // namespace htopt
