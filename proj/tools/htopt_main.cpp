// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: benchmark studies, statistical validators, and the
// closed-form bound calculator.
//
// Exit codes: 0 success, 1 a validator's statistical check failed,
// 2 configuration or I/O error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "htopt/bounds.hpp"
#include "htopt/config.hpp"
#include "htopt/experiments.hpp"
#include "htopt/io.hpp"

namespace {

using nlohmann::json;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> workers;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_out) {
  cmd->add_option("--config", args.config_path, "Path to the key=value config file")->required();
  auto* out = cmd->add_option("--out", args.out_dir, "Directory for result files");
  if (needs_out) out->required();
  cmd->add_option("--seed", args.seed, "Master seed (overrides experiment.seed)");
  cmd->add_option("--replicates", args.replicates, "Replicate count (overrides experiment.replicates)");
  cmd->add_option("--workers", args.workers, "Worker threads (overrides HTOPT_WORKERS; default 1)");
  cmd->add_flag("--verbose", args.verbose, "Echo the resolved configuration with value origins");
}

int resolve_workers(const CommonArgs& args) {
  int workers = 1;
  if (const char* env = std::getenv("HTOPT_WORKERS")) {
    try {
      workers = std::stoi(env);
    } catch (const std::exception&) {
      throw htopt::ConfigError(std::string("HTOPT_WORKERS is not an integer: '") + env + "'");
    }
  }
  if (args.workers) workers = *args.workers;
  if (workers < 1) throw htopt::ConfigError("worker count must be >= 1");
  return workers;
}

void print_resolved(const htopt::ResolvedConfig& resolved) {
  std::cerr << "# resolved configuration (hash " << resolved.hash << ")\n";
  for (const auto& [key, value] : resolved.values) {
    const auto src = resolved.sources.find(key);
    std::cerr << key << " = " << value << "   [" << (src == resolved.sources.end() ? "?" : src->second)
              << "]\n";
  }
}

htopt::ExperimentSpec load_spec(const CommonArgs& args, htopt::ExperimentKind kind) {
  htopt::CliOverrides overrides;
  overrides.seed = args.seed;
  overrides.replicates = args.replicates;
  htopt::ExperimentSpec spec =
      htopt::resolve_experiment_config(htopt::load_raw_config(args.config_path), kind, overrides);
  if (args.verbose) print_resolved(spec.resolved);
  return spec;
}

int run_bench_convergence(const CommonArgs& args) {
  const htopt::ExperimentSpec spec = load_spec(args, htopt::ExperimentKind::kConvergence);
  const htopt::ConvergenceResult result = htopt::run_convergence_study(spec, resolve_workers(args));
  htopt::write_outputs(spec, result, args.out_dir);
  for (const htopt::AlgorithmSummary& alg : result.algorithms)
    std::printf("%-20s min |grad F| = %.6g   avg |grad F| = %.6g\n", alg.name.c_str(),
                alg.min_grad_norm, alg.avg_grad_norm);
  std::printf("wrote %s/summary.json\n", args.out_dir.c_str());
  return 0;
}

int run_bench_quantile(const CommonArgs& args) {
  const htopt::ExperimentSpec spec = load_spec(args, htopt::ExperimentKind::kQuantile);
  const htopt::QuantileResult result = htopt::run_quantile_study(spec, resolve_workers(args));
  htopt::write_outputs(spec, result, args.out_dir);
  for (const htopt::QuantileCurve& curve : result.algorithms) {
    std::printf("%-20s", curve.name.c_str());
    for (std::size_t i = 0; i < curve.deltas.size(); ++i)
      std::printf("  q(%g)=%.4g", curve.deltas[i], curve.quantiles[i]);
    std::printf("\n");
  }
  std::printf("wrote %s/summary.json\n", args.out_dir.c_str());
  return 0;
}

int run_accum_compare_cmd(const CommonArgs& args) {
  const htopt::ExperimentSpec spec = load_spec(args, htopt::ExperimentKind::kAccumCompare);
  const htopt::AccumCompareResult result = htopt::run_accum_compare(spec, resolve_workers(args));
  htopt::write_outputs(spec, result, args.out_dir);
  std::printf("per-micro-batch clipping won %d of %zu paired replicates (avg |grad F|)\n",
              result.per_micro_wins, result.pairs.size());
  std::printf("wrote %s/summary.json\n", args.out_dir.c_str());
  return 0;
}

int run_validate(const std::string& target, const CommonArgs& args) {
  const htopt::ExperimentKind kind = htopt::experiment_kind_from_string(target);
  const htopt::ExperimentSpec spec = load_spec(args, kind);
  const int workers = resolve_workers(args);
  bool passed = false;
  switch (kind) {
    case htopt::ExperimentKind::kLemmaB1: {
      const htopt::MeanErrorValidation v = htopt::validate_mean_error(spec, workers);
      htopt::write_outputs(spec, v, args.out_dir);
      for (const htopt::MeanErrorPoint& pt : v.points)
        std::printf("n=%-5d mse=%.6g  bound=%.6g  %s\n", pt.n, pt.mse, pt.bound,
                    pt.within ? "ok" : "VIOLATED");
      if (v.have_slope)
        std::printf("decay slope %.4f vs target %.4f (window 0.15): %s\n", v.slope, v.target_slope,
                    v.slope_ok ? "ok" : "VIOLATED");
      passed = v.passed;
      break;
    }
    case htopt::ExperimentKind::kLemmaC1: {
      const htopt::ConfidenceValidation v = htopt::validate_confidence(spec, workers);
      htopt::write_outputs(spec, v, args.out_dir);
      for (const htopt::ConfidencePoint& pt : v.points)
        std::printf("delta=%-8g freq=%.6g  limit=%.6g  %s\n", pt.delta, pt.freq, pt.limit,
                    pt.within ? "ok" : "VIOLATED");
      passed = v.passed;
      break;
    }
    case htopt::ExperimentKind::kPropB1: {
      const htopt::DescentValidation v = htopt::validate_descent(spec, workers);
      htopt::write_outputs(spec, v, args.out_dir);
      for (const htopt::DescentModeResult& mode : v.modes)
        std::printf("%-20s min slack = %.6g (replicate %d)  %s\n", mode.mode.c_str(), mode.min_slack,
                    mode.worst_replicate, mode.holds ? "ok" : "VIOLATED");
      passed = v.passed;
      break;
    }
    case htopt::ExperimentKind::kBernstein: {
      const htopt::TailValidation v = htopt::validate_bernstein(spec, workers);
      htopt::write_outputs(spec, v, args.out_dir);
      for (const htopt::TailPoint& pt : v.points)
        std::printf("n=%-5d eps=%-5g freq=%.6g  bound=%.6g  %s\n", pt.n, pt.eps, pt.freq, pt.bound,
                    pt.within ? "ok" : "VIOLATED");
      passed = v.passed;
      break;
    }
    default:
      throw htopt::ConfigError("'" + target + "' is not a validator");
  }
  std::printf("%s: %s\n", target.c_str(), passed ? "PASSED" : "FAILED");
  return passed ? 0 : 1;
}

int run_bounds(const CommonArgs& args) {
  const htopt::BoundsRequest req = htopt::resolve_bounds_config(htopt::load_raw_config(args.config_path));
  if (args.verbose) print_resolved(req.resolved);
  json out = json::object();
  const auto put = [&out](const char* key, auto&& fn) {
    try {
      out[key] = fn();
    } catch (const std::domain_error&) {
      // Guarantee does not apply to these inputs; omit its key.
    }
  };
  put("thm1", [&] { return htopt::expected_bound(req.inputs); });
  put("cor1_n", [&] { return htopt::recommended_batch(req.inputs); });
  put("cor1", [&] { return htopt::expected_rate_bound(req.inputs); });
  if (req.has_delta) {
    put("thm2", [&] { return htopt::high_prob_bound(req.inputs); });
    put("cor2", [&] { return htopt::high_prob_rate_bound(req.inputs); });
    put("remark", [&] { return htopt::squared_log_rate_bound(req.inputs); });
  }
  std::cout << out.dump(2) << "\n";
  if (!args.out_dir.empty()) {
    json file = out;
    file["config"] = req.resolved.values;
    file["config_hash"] = req.resolved.hash;
    htopt::atomic_write_file(args.out_dir + "/bounds.json", file.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heavy-tailed stochastic optimization workbench"};
  app.require_subcommand(1);

  CommonArgs conv_args, quant_args, accum_args, val_args, bounds_args;
  std::string validate_target;

  CLI::App* conv = app.add_subcommand("bench-convergence",
                                      "Average gradient-norm trajectories for each algorithm");
  add_common(conv, conv_args, /*needs_out=*/true);

  CLI::App* quant = app.add_subcommand("bench-quantile",
                                       "Upper quantiles of the run-averaged gradient norm");
  add_common(quant, quant_args, /*needs_out=*/true);

  CLI::App* accum = app.add_subcommand("accum-compare",
                                       "Paired comparison of clip placement under accumulation");
  add_common(accum, accum_args, /*needs_out=*/true);

  CLI::App* val = app.add_subcommand("validate", "Monte Carlo checks of the analytical guarantees");
  val->add_option("target", validate_target, "Which guarantee to check")
      ->required()
      ->check(CLI::IsMember({"lemma-b1", "lemma-c1", "prop-b1", "bernstein"}));
  add_common(val, val_args, /*needs_out=*/true);

  CLI::App* bounds = app.add_subcommand("bounds", "Evaluate the closed-form guarantees as JSON");
  add_common(bounds, bounds_args, /*needs_out=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (conv->parsed()) return run_bench_convergence(conv_args);
    if (quant->parsed()) return run_bench_quantile(quant_args);
    if (accum->parsed()) return run_accum_compare_cmd(accum_args);
    if (val->parsed()) return run_validate(validate_target, val_args);
    if (bounds->parsed()) return run_bounds(bounds_args);
  } catch (const htopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
