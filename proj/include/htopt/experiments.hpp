// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment harness: benchmark studies, statistical validators, and the
// writers that lay their results out on disk. Every runner is deterministic
// in (config, master seed) and independent of the worker count.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "htopt/config.hpp"
#include "htopt/core.hpp"
#include "htopt/optimizers.hpp"

namespace htopt {

// Stream index reserved for drawing the shared starting point; replicate
// noise streams are small integers (or (grid << 32) | replicate), so this
// cannot collide with them.
inline constexpr std::uint64_t kInitStreamIndex = std::uint64_t{1} << 62;

// Shared starting point: components uniform on [-1, 1], drawn from the
// reserved init stream of `master_seed`.
Vector draw_x1(int dim, std::uint64_t master_seed);

// Least-squares slope of y against x. Needs at least two distinct x values.
inline double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("slope needs matching lists with at least two points");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("slope needs at least two distinct x values");
  return (n * sxy - sx * sy) / denom;
}

// 1-based order-statistic index for the (1 - delta) quantile of `replicates`
// sorted values. ceil((1 - delta) * R) computed with a relative guard so that
// mathematically integral products do not round up one slot.
inline int quantile_order_index(double delta, int replicates) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (replicates < 1) throw std::invalid_argument("need at least one replicate");
  const double r = static_cast<double>(replicates);
  const double target = (1.0 - delta) * r;
  int idx = static_cast<int>(std::ceil(target - 1e-9 * r));
  if (idx < 1) idx = 1;
  if (idx > replicates) idx = replicates;
  return idx;
}

// (1 - delta) quantile of an ascending-sorted sample.
inline double quantile_from_sorted(const std::vector<double>& sorted, double delta) {
  if (sorted.empty()) throw std::invalid_argument("empty sample");
  const int idx = quantile_order_index(delta, static_cast<int>(sorted.size()));
  return sorted[static_cast<std::size_t>(idx - 1)];
}

// Fraction of interior points whose second divided difference is <= 0 (with a
// small absolute tolerance), i.e. how concave the curve y(x) looks on a
// possibly uneven grid. Returns 1 for curves with fewer than 3 points.
inline double concave_fraction(const std::vector<double>& xs, const std::vector<double>& ys,
                               double tol = 1e-12) {
  if (xs.size() != ys.size()) throw std::invalid_argument("grid size mismatch");
  if (xs.size() < 3) return 1.0;
  int concave = 0;
  const int interior = static_cast<int>(xs.size()) - 2;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const double left = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
    const double right = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    if (right - left <= tol) ++concave;
  }
  return static_cast<double>(concave) / static_cast<double>(interior);
}

// ---------------------------------------------------------------------------
// Benchmark studies.

struct AlgorithmSummary {
  std::string name;
  std::vector<double> curve;  // replicate-averaged |grad F(x_t)|, t = 1..T
  double min_grad_norm = 0.0;  // min over t of the averaged curve
  double avg_grad_norm = 0.0;  // mean over t of the averaged curve
  std::vector<RunTrace> traces;  // one per replicate, in replicate order
};

struct ConvergenceResult {
  Vector x1;
  double delta1 = 0.0;
  std::vector<AlgorithmSummary> algorithms;
};

// Runs every configured algorithm on the common problem with paired noise:
// replicate r uses stream index r for every algorithm.
ConvergenceResult run_convergence_study(const ExperimentSpec& spec, int workers);

struct QuantileCurve {
  std::string name;
  std::vector<double> deltas;     // descending, so ln(1/delta) ascends
  std::vector<double> quantiles;  // (1 - delta) quantile of per-run mean |grad F|
};

struct QuantileResult {
  Vector x1;
  double delta1 = 0.0;
  std::vector<QuantileCurve> algorithms;
};

// Tail study: each replicate contributes its run-averaged gradient norm; the
// curves report upper quantiles of that statistic. Traces are not retained.
QuantileResult run_quantile_study(const ExperimentSpec& spec, int workers);

struct AccumPair {
  int replicate = 0;
  double avg_norm_per_micro = 0.0;
  double avg_norm_post = 0.0;
  double final_obj_per_micro = 0.0;
  double final_obj_post = 0.0;
};

struct AccumCompareResult {
  Vector x1;
  double delta1 = 0.0;
  std::vector<AccumPair> pairs;           // one per replicate
  int per_micro_wins = 0;                 // replicates where per-micro avg norm <= post
  std::vector<RunTrace> traces_per_micro;  // one per replicate
  std::vector<RunTrace> traces_post;
};

// Paired comparison of the two clip placements: both runs of replicate r
// consume the same gradient stream, so the only difference is the reduction.
AccumCompareResult run_accum_compare(const ExperimentSpec& spec, int workers);

// ---------------------------------------------------------------------------
// Statistical validators. Each returns a `passed` verdict; the CLI maps a
// false verdict to a nonzero exit without treating it as an I/O failure.

struct MeanErrorPoint {
  int n = 0;
  double mse = 0.0;
  double bound = 0.0;
  bool within = false;
};

struct MeanErrorValidation {
  double p = 0.0;
  double sigma = 0.0;  // moment scale: sigma^p = E|X|^p of the scalar noise
  std::vector<MeanErrorPoint> points;
  double slope = 0.0;         // ln(mse) vs ln(n) over grid entries n > 1
  double target_slope = 0.0;  // -2(p-1)/p
  bool have_slope = false;
  bool bounds_ok = false;
  bool slope_ok = false;
  bool passed = false;
};

// Mean-error validator: per-sample clipping with thresholds sigma * k^(1/p)
// on zero-mean scalar noise with exactly p-th moment sigma^p; checks the MSE
// bound 8 sigma^2 n^(-2(p-1)/p) and the decay rate on a batch-size grid.
MeanErrorValidation validate_mean_error(const ExperimentSpec& spec, int workers);

struct ConfidencePoint {
  double delta = 0.0;
  double alpha = 0.0;   // per-sample threshold scale used at this level
  double radius = 0.0;  // deviation radius 7 sigma (ln(1/delta)/n)^((p-1)/p)
  double freq = 0.0;    // empirical P(|estimate - mean| > radius)
  double limit = 0.0;   // delta * e^(1/4)
  bool within = false;
};

struct ConfidenceValidation {
  double p = 0.0;
  double sigma = 0.0;
  int n = 0;
  std::vector<ConfidencePoint> points;
  bool passed = false;
};

// Confidence validator: tunes the clip scale to the target level and checks
// the empirical deviation frequency against delta * e^(1/4).
ConfidenceValidation validate_confidence(const ExperimentSpec& spec, int workers);

struct DescentModeResult {
  std::string mode;
  double min_slack = 0.0;  // min over seeds of (rhs - lhs)
  int worst_replicate = 0;
  bool holds = false;
};

struct DescentValidation {
  Vector x1;
  double delta1 = 0.0;
  std::vector<DescentModeResult> modes;
  bool passed = false;
};

// Pathwise descent validator: for every estimator mode and every seed, the
// step-size-weighted squared gradient norms must stay below twice the initial
// gap plus the weighted squared estimator errors (raw steps, eta < 1/L).
DescentValidation validate_descent(const ExperimentSpec& spec, int workers);

struct TailPoint {
  int n = 0;
  double eps = 0.0;
  double freq = 0.0;
  double bound = 0.0;
  bool within = false;
};

struct TailValidation {
  double sigma_sq = 0.0;
  double cap = 0.0;
  std::vector<TailPoint> points;
  bool passed = false;
};

// Bounded-noise tail validator: batch means of radially clamped Gaussians
// against the Bernstein-style tail exp(-n eps^2 / (8 sigma^2 + cap * eps) + 1/4).
TailValidation validate_bernstein(const ExperimentSpec& spec, int workers);

// ---------------------------------------------------------------------------
// Output writers. Each creates `out_dir` if needed and writes summary.json
// plus the experiment's data files atomically (temp file + rename).

void write_outputs(const ExperimentSpec& spec, const ConvergenceResult& result,
                   const std::string& out_dir);
void write_outputs(const ExperimentSpec& spec, const QuantileResult& result,
                   const std::string& out_dir);
void write_outputs(const ExperimentSpec& spec, const AccumCompareResult& result,
                   const std::string& out_dir);
void write_outputs(const ExperimentSpec& spec, const MeanErrorValidation& result,
                   const std::string& out_dir);
void write_outputs(const ExperimentSpec& spec, const ConfidenceValidation& result,
                   const std::string& out_dir);
void write_outputs(const ExperimentSpec& spec, const DescentValidation& result,
                   const std::string& out_dir);
void write_outputs(const ExperimentSpec& spec, const TailValidation& result,
                   const std::string& out_dir);

}  // namespace htopt
