// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "htopt/bounds.hpp"
#include "htopt/noise.hpp"
#include "htopt/optimizers.hpp"

namespace htopt {

// Anything wrong with configuration input: unreadable file, malformed line,
// unknown key, out-of-range value, inconsistent combination. The CLI maps
// this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  kConvergence,
  kQuantile,
  kLemmaB1,
  kLemmaC1,
  kPropB1,
  kAccumCompare,
  kBernstein,
};

inline const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConvergence: return "convergence";
    case ExperimentKind::kQuantile: return "quantile";
    case ExperimentKind::kLemmaB1: return "lemma-b1";
    case ExperimentKind::kLemmaC1: return "lemma-c1";
    case ExperimentKind::kPropB1: return "prop-b1";
    case ExperimentKind::kAccumCompare: return "accum-compare";
    case ExperimentKind::kBernstein: return "bernstein";
  }
  throw std::logic_error("unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& s);

struct RawConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

// Flat key=value file: '#' comments, blank lines, one dotted key per line.
// Duplicate keys are errors; order is preserved for diagnostics.
struct RawConfig {
  std::string origin;  // file name or synthetic label, used in messages
  std::vector<RawConfigEntry> entries;
};

RawConfig parse_raw_config(std::string_view text, const std::string& origin);
RawConfig load_raw_config(const std::string& path);

// Command-line values that take precedence over file values, which take
// precedence over built-in defaults.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
};

struct ResolvedConfig {
  // Canonical echo of every effective key (defaults filled in), as strings.
  std::map<std::string, std::string> values;
  // Where each value came from: "default", "file", or "cli".
  std::map<std::string, std::string> sources;
  // SHA-1 over the sorted "key=value" lines; identifies the configuration.
  std::string hash;
};

struct AlgorithmConfig {
  std::string name;  // estimator mode string
  EstimatorConfig estimator;
  double eta = 0.01;
};

// Fully resolved description of one experiment.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kConvergence;
  std::uint64_t master_seed = 9037;
  int replicates = 10;

  int dim = 10;
  NoiseModel noise;
  std::vector<AlgorithmConfig> algorithms;  // convergence / quantile
  OptimizerConfig optimizer;                // schedule, steps, momentum, decay
  AccumulationConfig accum;                 // accum-compare

  std::vector<double> quantile_deltas;

  double lemma_p = 1.5;           // moment order for the validators
  std::vector<int> lemma_n_grid;  // batch sizes for the mean-error validator
  int lemma_n = 64;               // batch size for the confidence validator
  std::vector<double> lemma_deltas;

  int bernstein_dim = 3;
  double bernstein_cap = 4.0;
  std::vector<int> bernstein_n_grid;
  std::vector<double> bernstein_eps;

  ResolvedConfig resolved;
};

// Builds the spec for `kind` from raw key=value entries plus CLI overrides.
// Unknown keys, keys that the kind does not use, malformed values, and
// out-of-range values all raise ConfigError naming the key (and line).
ExperimentSpec resolve_experiment_config(const RawConfig& raw, ExperimentKind kind,
                                         const CliOverrides& overrides);

struct BoundsRequest {
  BoundInputs inputs;
  // True when the config supplied a confidence level; the high-probability
  // bounds are only reported in that case.
  bool has_delta = false;
  ResolvedConfig resolved;
};

// Builds calculator inputs from keys bounds.{delta1,L,sigma,p,T,n,delta,eta}.
BoundsRequest resolve_bounds_config(const RawConfig& raw);

}  // namespace htopt
