// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#include "htopt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"

#include "htopt/bounds.hpp"
#include "htopt/estimators.hpp"
#include "htopt/io.hpp"
#include "htopt/noise.hpp"
#include "htopt/parallel.hpp"
#include "htopt/problems.hpp"

namespace htopt {

namespace {

using nlohmann::json;

// Noise stream for replicate r of grid cell g; grid-free runs pass g = 0 and
// use the replicate index directly, matching the paired-noise convention.
std::uint64_t grid_stream(std::uint64_t grid_index, std::uint64_t replicate) {
  return (grid_index << 32) | replicate;
}

double mean_true_grad_norm(const RunTrace& trace) {
  double sum = 0.0;
  for (const IterationRecord& rec : trace.iterations) sum += rec.true_grad_norm;
  return sum / static_cast<double>(trace.iterations.size());
}

// Scalar heavy-tailed noise whose p-th absolute moment is finite by a clean
// margin: tail index p + 1/2, unit scale, so E|X|^p = 2p + 1 exactly.
NoiseModel scalar_validator_noise(double p) {
  NoiseModel nm;
  nm.kind = NoiseKind::kSymmetrizedPareto;
  nm.dim = 1;
  nm.tail_index = p + 0.5;
  nm.scale = 1.0;
  return nm;
}

double validator_sigma(double p) { return std::pow(2.0 * p + 1.0, 1.0 / p); }

// Fills a 1 x n batch of scalar noise draws.
void fill_scalar_batch(const NoiseModel& nm, RngStream& stream, Matrix& grads) {
  Vector one(1);
  for (Eigen::Index i = 0; i < grads.cols(); ++i) {
    sample_into(nm, stream, one);
    grads(0, i) = one(0);
  }
}

json json_vector(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json base_summary(const ExperimentSpec& spec) {
  json j;
  j["experiment"] = to_string(spec.kind);
  j["config"] = spec.resolved.values;
  j["config_hash"] = spec.resolved.hash;
  return j;
}

void write_summary(const std::string& out_dir, const json& j) {
  atomic_write_file(out_dir + "/summary.json", j.dump(2) + "\n");
}

std::string three_column_series(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<double>& c) {
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i)
    out += format_g17(a[i]) + " " + format_g17(b[i]) + " " + format_g17(c[i]) + "\n";
  return out;
}

}  // namespace

Vector draw_x1(int dim, std::uint64_t master_seed) {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  RngStream stream(SeedSpec{master_seed, kInitStreamIndex});
  Vector x(dim);
  for (int i = 0; i < dim; ++i) x(i) = stream.uniform(-1.0, 1.0);
  return x;
}

// ---------------------------------------------------------------------------
// Benchmark studies.

ConvergenceResult run_convergence_study(const ExperimentSpec& spec, int workers) {
  spec.noise.validate();
  if (spec.algorithms.empty()) throw std::invalid_argument("no algorithms configured");
  const QuadraticProblem prob(spec.dim, spec.noise);

  ConvergenceResult res;
  res.x1 = draw_x1(spec.dim, spec.master_seed);
  res.delta1 = prob.init_gap(res.x1);

  const int num_algs = static_cast<int>(spec.algorithms.size());
  const int reps = spec.replicates;
  res.algorithms.resize(static_cast<std::size_t>(num_algs));
  for (int a = 0; a < num_algs; ++a) {
    res.algorithms[static_cast<std::size_t>(a)].name = spec.algorithms[static_cast<std::size_t>(a)].name;
    res.algorithms[static_cast<std::size_t>(a)].traces.resize(static_cast<std::size_t>(reps));
  }

  parallel_for(static_cast<std::int64_t>(num_algs) * reps, workers, [&](std::int64_t slot) {
    const int a = static_cast<int>(slot / reps);
    const int r = static_cast<int>(slot % reps);
    OptimizerConfig opt = spec.optimizer;
    opt.estimator = spec.algorithms[static_cast<std::size_t>(a)].estimator;
    opt.eta = spec.algorithms[static_cast<std::size_t>(a)].eta;
    res.algorithms[static_cast<std::size_t>(a)].traces[static_cast<std::size_t>(r)] =
        run(prob, opt, SeedSpec{spec.master_seed, static_cast<std::uint64_t>(r)}, res.x1);
  });

  const int steps = spec.optimizer.steps;
  for (AlgorithmSummary& alg : res.algorithms) {
    alg.curve.assign(static_cast<std::size_t>(steps), 0.0);
    for (int t = 0; t < steps; ++t) {
      double sum = 0.0;
      for (int r = 0; r < reps; ++r)
        sum += alg.traces[static_cast<std::size_t>(r)].iterations[static_cast<std::size_t>(t)].true_grad_norm;
      alg.curve[static_cast<std::size_t>(t)] = sum / static_cast<double>(reps);
    }
    alg.min_grad_norm = *std::min_element(alg.curve.begin(), alg.curve.end());
    double total = 0.0;
    for (double v : alg.curve) total += v;
    alg.avg_grad_norm = total / static_cast<double>(steps);
  }
  return res;
}

QuantileResult run_quantile_study(const ExperimentSpec& spec, int workers) {
  spec.noise.validate();
  if (spec.algorithms.empty()) throw std::invalid_argument("no algorithms configured");
  if (spec.quantile_deltas.empty()) throw std::invalid_argument("no quantile levels configured");
  const QuadraticProblem prob(spec.dim, spec.noise);

  QuantileResult res;
  res.x1 = draw_x1(spec.dim, spec.master_seed);
  res.delta1 = prob.init_gap(res.x1);

  const int num_algs = static_cast<int>(spec.algorithms.size());
  const int reps = spec.replicates;
  std::vector<double> stats(static_cast<std::size_t>(num_algs) * static_cast<std::size_t>(reps));

  parallel_for(static_cast<std::int64_t>(num_algs) * reps, workers, [&](std::int64_t slot) {
    const int a = static_cast<int>(slot / reps);
    const int r = static_cast<int>(slot % reps);
    OptimizerConfig opt = spec.optimizer;
    opt.estimator = spec.algorithms[static_cast<std::size_t>(a)].estimator;
    opt.eta = spec.algorithms[static_cast<std::size_t>(a)].eta;
    const RunTrace trace =
        run(prob, opt, SeedSpec{spec.master_seed, static_cast<std::uint64_t>(r)}, res.x1);
    stats[static_cast<std::size_t>(slot)] = mean_true_grad_norm(trace);
  });

  std::vector<double> deltas = spec.quantile_deltas;
  std::sort(deltas.begin(), deltas.end(), std::greater<double>());

  res.algorithms.resize(static_cast<std::size_t>(num_algs));
  for (int a = 0; a < num_algs; ++a) {
    QuantileCurve& curve = res.algorithms[static_cast<std::size_t>(a)];
    curve.name = spec.algorithms[static_cast<std::size_t>(a)].name;
    curve.deltas = deltas;
    std::vector<double> sorted(stats.begin() + static_cast<std::ptrdiff_t>(a) * reps,
                               stats.begin() + static_cast<std::ptrdiff_t>(a + 1) * reps);
    std::sort(sorted.begin(), sorted.end());
    curve.quantiles.reserve(deltas.size());
    for (double d : deltas) curve.quantiles.push_back(quantile_from_sorted(sorted, d));
  }
  return res;
}

AccumCompareResult run_accum_compare(const ExperimentSpec& spec, int workers) {
  spec.noise.validate();
  spec.accum.validate();
  const QuadraticProblem prob(spec.dim, spec.noise);

  AccumCompareResult res;
  res.x1 = draw_x1(spec.dim, spec.master_seed);
  res.delta1 = prob.init_gap(res.x1);

  const int reps = spec.replicates;
  res.traces_per_micro.resize(static_cast<std::size_t>(reps));
  res.traces_post.resize(static_cast<std::size_t>(reps));

  parallel_for(reps, workers, [&](std::int64_t slot) {
    const auto r = static_cast<std::size_t>(slot);
    const SeedSpec seed{spec.master_seed, static_cast<std::uint64_t>(slot)};
    AccumulationConfig per_micro = spec.accum;
    per_micro.placement = ClipPlacement::kPerMicroBatch;
    AccumulationConfig post = spec.accum;
    post.placement = ClipPlacement::kPostAccumulation;
    res.traces_per_micro[r] = run_accumulated(prob, per_micro, spec.optimizer, seed, res.x1);
    res.traces_post[r] = run_accumulated(prob, post, spec.optimizer, seed, res.x1);
  });

  res.pairs.resize(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    AccumPair& pair = res.pairs[static_cast<std::size_t>(r)];
    pair.replicate = r;
    pair.avg_norm_per_micro = mean_true_grad_norm(res.traces_per_micro[static_cast<std::size_t>(r)]);
    pair.avg_norm_post = mean_true_grad_norm(res.traces_post[static_cast<std::size_t>(r)]);
    pair.final_obj_per_micro = prob.value(res.traces_per_micro[static_cast<std::size_t>(r)].x_final);
    pair.final_obj_post = prob.value(res.traces_post[static_cast<std::size_t>(r)].x_final);
    if (pair.avg_norm_per_micro <= pair.avg_norm_post) ++res.per_micro_wins;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Statistical validators.

MeanErrorValidation validate_mean_error(const ExperimentSpec& spec, int workers) {
  MeanErrorValidation out;
  out.p = spec.lemma_p;
  out.sigma = validator_sigma(spec.lemma_p);
  out.target_slope = -2.0 * (spec.lemma_p - 1.0) / spec.lemma_p;
  if (spec.lemma_n_grid.empty()) throw std::invalid_argument("empty batch-size grid");

  const NoiseModel nm = scalar_validator_noise(spec.lemma_p);
  const int reps = spec.replicates;
  const auto grid_size = spec.lemma_n_grid.size();
  std::vector<double> err_sq(grid_size * static_cast<std::size_t>(reps));

  parallel_for(static_cast<std::int64_t>(grid_size) * reps, workers, [&](std::int64_t slot) {
    const auto gi = static_cast<std::size_t>(slot / reps);
    const auto r = static_cast<std::uint64_t>(slot % reps);
    const int n = spec.lemma_n_grid[gi];
    RngStream stream(SeedSpec{spec.master_seed, grid_stream(gi, r)});
    Matrix grads(1, n);
    fill_scalar_batch(nm, stream, grads);
    const double est = ps_clip_estimate(grads, out.sigma, spec.lemma_p).estimate(0);
    err_sq[static_cast<std::size_t>(slot)] = est * est;
  });

  out.points.resize(grid_size);
  out.bounds_ok = true;
  std::vector<double> log_n, log_mse;
  for (std::size_t gi = 0; gi < grid_size; ++gi) {
    MeanErrorPoint& pt = out.points[gi];
    pt.n = spec.lemma_n_grid[gi];
    double sum = 0.0;
    for (int r = 0; r < reps; ++r) sum += err_sq[gi * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)];
    pt.mse = sum / static_cast<double>(reps);
    pt.bound = 8.0 * out.sigma * out.sigma *
               std::pow(static_cast<double>(pt.n), -2.0 * (spec.lemma_p - 1.0) / spec.lemma_p);
    pt.within = pt.mse <= pt.bound;
    out.bounds_ok = out.bounds_ok && pt.within;
    if (pt.n > 1 && pt.mse > 0.0) {
      log_n.push_back(std::log(static_cast<double>(pt.n)));
      log_mse.push_back(std::log(pt.mse));
    }
  }
  out.have_slope = log_n.size() >= 2;
  if (out.have_slope) {
    out.slope = least_squares_slope(log_n, log_mse);
    out.slope_ok = std::abs(out.slope - out.target_slope) <= 0.15;
  } else {
    out.slope_ok = true;
  }
  out.passed = out.bounds_ok && out.slope_ok;
  return out;
}

ConfidenceValidation validate_confidence(const ExperimentSpec& spec, int workers) {
  ConfidenceValidation out;
  out.p = spec.lemma_p;
  out.sigma = validator_sigma(spec.lemma_p);
  out.n = spec.lemma_n;
  if (spec.lemma_deltas.empty()) throw std::invalid_argument("empty confidence grid");

  const NoiseModel nm = scalar_validator_noise(spec.lemma_p);
  const int reps = spec.replicates;
  const auto grid_size = spec.lemma_deltas.size();

  out.points.resize(grid_size);
  for (std::size_t di = 0; di < grid_size; ++di) {
    ConfidencePoint& pt = out.points[di];
    pt.delta = spec.lemma_deltas[di];
    const double log_inv = std::log(1.0 / pt.delta);
    pt.alpha = out.sigma / std::pow(log_inv, 1.0 / spec.lemma_p);
    pt.radius = 7.0 * out.sigma *
                std::pow(log_inv / static_cast<double>(spec.lemma_n), (spec.lemma_p - 1.0) / spec.lemma_p);
    pt.limit = pt.delta * std::exp(0.25);
  }

  std::vector<std::uint8_t> exceeded(grid_size * static_cast<std::size_t>(reps));
  parallel_for(static_cast<std::int64_t>(grid_size) * reps, workers, [&](std::int64_t slot) {
    const auto di = static_cast<std::size_t>(slot / reps);
    const auto r = static_cast<std::uint64_t>(slot % reps);
    RngStream stream(SeedSpec{spec.master_seed, grid_stream(di, r)});
    Matrix grads(1, spec.lemma_n);
    fill_scalar_batch(nm, stream, grads);
    const double est = ps_clip_estimate(grads, out.points[di].alpha, spec.lemma_p).estimate(0);
    exceeded[static_cast<std::size_t>(slot)] = std::abs(est) > out.points[di].radius ? 1 : 0;
  });

  out.passed = true;
  for (std::size_t di = 0; di < grid_size; ++di) {
    long long count = 0;
    for (int r = 0; r < reps; ++r)
      count += exceeded[di * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)];
    ConfidencePoint& pt = out.points[di];
    pt.freq = static_cast<double>(count) / static_cast<double>(reps);
    pt.within = pt.freq <= pt.limit;
    out.passed = out.passed && pt.within;
  }
  return out;
}

DescentValidation validate_descent(const ExperimentSpec& spec, int workers) {
  spec.noise.validate();
  if (spec.optimizer.momentum != 0.0 || spec.optimizer.weight_decay != 0.0)
    throw std::invalid_argument("the descent check requires momentum = 0 and weight_decay = 0");
  const QuadraticProblem prob(spec.dim, spec.noise);

  DescentValidation out;
  out.x1 = draw_x1(spec.dim, spec.master_seed);
  out.delta1 = prob.init_gap(out.x1);

  const std::vector<EstimatorMode> modes = {
      EstimatorMode::kPsClipIncreasing, EstimatorMode::kPsClipConstant, EstimatorMode::kGlobalClip,
      EstimatorMode::kNormalize, EstimatorMode::kPlainMean};
  const int reps = spec.replicates;
  std::vector<double> slack(modes.size() * static_cast<std::size_t>(reps));

  parallel_for(static_cast<std::int64_t>(modes.size()) * reps, workers, [&](std::int64_t slot) {
    const auto mi = static_cast<std::size_t>(slot / reps);
    const auto r = static_cast<std::uint64_t>(slot % reps);
    OptimizerConfig opt = spec.optimizer;
    opt.estimator.mode = modes[mi];
    opt.enforce_step_limit = true;
    const RunTrace trace = run(prob, opt, SeedSpec{spec.master_seed, r}, out.x1);
    slack[static_cast<std::size_t>(slot)] = check_descent_inequality(trace, out.delta1).slack;
  });

  out.passed = true;
  out.modes.resize(modes.size());
  for (std::size_t mi = 0; mi < modes.size(); ++mi) {
    DescentModeResult& mode_res = out.modes[mi];
    mode_res.mode = to_string(modes[mi]);
    mode_res.min_slack = slack[mi * static_cast<std::size_t>(reps)];
    mode_res.worst_replicate = 0;
    for (int r = 1; r < reps; ++r) {
      const double s = slack[mi * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)];
      if (s < mode_res.min_slack) {
        mode_res.min_slack = s;
        mode_res.worst_replicate = r;
      }
    }
    mode_res.holds = mode_res.min_slack >= -1e-9;
    out.passed = out.passed && mode_res.holds;
  }
  return out;
}

TailValidation validate_bernstein(const ExperimentSpec& spec, int workers) {
  TailValidation out;
  out.sigma_sq = static_cast<double>(spec.bernstein_dim);
  out.cap = spec.bernstein_cap;
  if (spec.bernstein_n_grid.empty() || spec.bernstein_eps.empty())
    throw std::invalid_argument("empty batch or deviation grid");

  const int reps = spec.replicates;
  const auto grid_size = spec.bernstein_n_grid.size();
  std::vector<double> norms(grid_size * static_cast<std::size_t>(reps));

  parallel_for(static_cast<std::int64_t>(grid_size) * reps, workers, [&](std::int64_t slot) {
    const auto ni = static_cast<std::size_t>(slot / reps);
    const auto r = static_cast<std::uint64_t>(slot % reps);
    const int n = spec.bernstein_n_grid[ni];
    RngStream stream(SeedSpec{spec.master_seed, grid_stream(ni, r)});
    Vector mean = Vector::Zero(spec.bernstein_dim);
    Vector z(spec.bernstein_dim);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < spec.bernstein_dim; ++j) z(j) = stream.normal();
      const double nz = z.norm();
      if (nz > spec.bernstein_cap) z *= spec.bernstein_cap / nz;
      mean += z;
    }
    mean /= static_cast<double>(n);
    norms[static_cast<std::size_t>(slot)] = mean.norm();
  });

  out.passed = true;
  for (std::size_t ni = 0; ni < grid_size; ++ni) {
    const int n = spec.bernstein_n_grid[ni];
    for (double eps : spec.bernstein_eps) {
      TailPoint pt;
      pt.n = n;
      pt.eps = eps;
      long long count = 0;
      for (int r = 0; r < reps; ++r)
        if (norms[ni * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)] >= eps) ++count;
      pt.freq = static_cast<double>(count) / static_cast<double>(reps);
      pt.bound = bernstein_tail(static_cast<double>(n), eps, out.cap, out.sigma_sq);
      pt.within = pt.freq <= pt.bound;
      out.passed = out.passed && pt.within;
      out.points.push_back(pt);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Writers.

void write_outputs(const ExperimentSpec& spec, const ConvergenceResult& result,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  json j = base_summary(spec);
  j["x1"] = json_vector(result.x1);
  j["delta1"] = result.delta1;
  json algs = json::object();
  for (const AlgorithmSummary& alg : result.algorithms) {
    algs[alg.name] = {{"min_grad_norm", alg.min_grad_norm}, {"avg_grad_norm", alg.avg_grad_norm}};
    std::vector<double> ts(alg.curve.size());
    for (std::size_t t = 0; t < ts.size(); ++t) ts[t] = static_cast<double>(t + 1);
    write_xy_series(out_dir + "/curve_" + alg.name + ".dat", ts, alg.curve);
    for (std::size_t r = 0; r < alg.traces.size(); ++r)
      write_trace_csv(out_dir + "/trace_" + alg.name + "_rep" + std::to_string(r) + ".csv",
                      alg.traces[r]);
  }
  j["results"] = algs;
  write_summary(out_dir, j);
}

void write_outputs(const ExperimentSpec& spec, const QuantileResult& result,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  json j = base_summary(spec);
  j["x1"] = json_vector(result.x1);
  j["delta1"] = result.delta1;
  json algs = json::object();
  for (const QuantileCurve& curve : result.algorithms) {
    algs[curve.name] = {{"deltas", curve.deltas}, {"quantiles", curve.quantiles}};
    std::vector<double> xs(curve.deltas.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = std::log(1.0 / curve.deltas[i]);
    write_xy_series(out_dir + "/quantile_" + curve.name + ".dat", xs, curve.quantiles);
  }
  j["results"] = algs;
  write_summary(out_dir, j);
}

void write_outputs(const ExperimentSpec& spec, const AccumCompareResult& result,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  json j = base_summary(spec);
  j["x1"] = json_vector(result.x1);
  j["delta1"] = result.delta1;
  json reps = json::array();
  for (const AccumPair& pair : result.pairs) {
    reps.push_back({{"replicate", pair.replicate},
                    {"avg_norm_per_micro", pair.avg_norm_per_micro},
                    {"avg_norm_post", pair.avg_norm_post},
                    {"final_obj_per_micro", pair.final_obj_per_micro},
                    {"final_obj_post", pair.final_obj_post}});
  }
  j["results"] = {{"per_micro_wins", result.per_micro_wins},
                  {"replicates", std::move(reps)}};
  for (std::size_t r = 0; r < result.traces_per_micro.size(); ++r) {
    write_trace_csv(out_dir + "/trace_per-micro-batch_rep" + std::to_string(r) + ".csv",
                    result.traces_per_micro[r]);
    write_trace_csv(out_dir + "/trace_post-accumulation_rep" + std::to_string(r) + ".csv",
                    result.traces_post[r]);
  }
  write_summary(out_dir, j);
}

void write_outputs(const ExperimentSpec& spec, const MeanErrorValidation& result,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  json j = base_summary(spec);
  json points = json::array();
  std::vector<double> ns, mses, bounds_col;
  for (const MeanErrorPoint& pt : result.points) {
    points.push_back({{"n", pt.n}, {"mse", pt.mse}, {"bound", pt.bound}, {"within", pt.within}});
    ns.push_back(static_cast<double>(pt.n));
    mses.push_back(pt.mse);
    bounds_col.push_back(pt.bound);
  }
  j["results"] = {{"p", result.p},
                  {"sigma", result.sigma},
                  {"points", std::move(points)},
                  {"slope", result.slope},
                  {"target_slope", result.target_slope},
                  {"have_slope", result.have_slope},
                  {"bounds_ok", result.bounds_ok},
                  {"slope_ok", result.slope_ok},
                  {"passed", result.passed}};
  atomic_write_file(out_dir + "/mse_vs_n.dat", three_column_series(ns, mses, bounds_col));
  write_summary(out_dir, j);
}

void write_outputs(const ExperimentSpec& spec, const ConfidenceValidation& result,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  json j = base_summary(spec);
  json points = json::array();
  std::vector<double> deltas, freqs, limits;
  for (const ConfidencePoint& pt : result.points) {
    points.push_back({{"delta", pt.delta},
                      {"alpha", pt.alpha},
                      {"radius", pt.radius},
                      {"freq", pt.freq},
                      {"limit", pt.limit},
                      {"within", pt.within}});
    deltas.push_back(pt.delta);
    freqs.push_back(pt.freq);
    limits.push_back(pt.limit);
  }
  j["results"] = {{"p", result.p},
                  {"sigma", result.sigma},
                  {"n", result.n},
                  {"points", std::move(points)},
                  {"passed", result.passed}};
  atomic_write_file(out_dir + "/freq_vs_delta.dat", three_column_series(deltas, freqs, limits));
  write_summary(out_dir, j);
}

void write_outputs(const ExperimentSpec& spec, const DescentValidation& result,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  json j = base_summary(spec);
  j["x1"] = json_vector(result.x1);
  j["delta1"] = result.delta1;
  json modes = json::array();
  for (const DescentModeResult& mode : result.modes)
    modes.push_back({{"mode", mode.mode},
                     {"min_slack", mode.min_slack},
                     {"worst_replicate", mode.worst_replicate},
                     {"holds", mode.holds}});
  j["results"] = {{"modes", std::move(modes)}, {"passed", result.passed}};
  write_summary(out_dir, j);
}

void write_outputs(const ExperimentSpec& spec, const TailValidation& result,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  json j = base_summary(spec);
  json points = json::array();
  for (const TailPoint& pt : result.points)
    points.push_back(
        {{"n", pt.n}, {"eps", pt.eps}, {"freq", pt.freq}, {"bound", pt.bound}, {"within", pt.within}});
  j["results"] = {{"sigma_sq", result.sigma_sq},
                  {"cap", result.cap},
                  {"points", std::move(points)},
                  {"passed", result.passed}};
  write_summary(out_dir, j);
}

}  // namespace htopt
