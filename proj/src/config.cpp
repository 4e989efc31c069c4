// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#include "htopt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <utility>

#include "htopt/io.hpp"

namespace htopt {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

bool parse_double_strict(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

bool parse_int_strict(const std::string& s, long long& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_u64_strict(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string_view rest(value);
  while (true) {
    const auto comma = rest.find(',');
    items.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return items;
}

const std::set<std::string>& global_known_keys() {
  static const std::set<std::string> keys = {
      "experiment.kind",       "experiment.seed",        "experiment.replicates",
      "experiment.algorithms", "problem.kind",           "problem.dim",
      "noise.kind",            "noise.p",                "noise.scale",
      "noise.std",             "estimator.mode",         "estimator.alpha",
      "estimator.beta",        "estimator.gamma",        "estimator.batch_size",
      "optimizer.eta",         "optimizer.schedule",     "optimizer.steps",
      "optimizer.momentum",    "optimizer.weight_decay", "optimizer.warmup_steps",
      "optimizer.floor_fraction", "accum.m",             "accum.k",
      "accum.placement",       "accum.gamma",            "quantile.deltas",
      "lemma.p",               "lemma.n_grid",           "lemma.n",
      "lemma.deltas",          "bernstein.dim",          "bernstein.cap",
      "bernstein.n_grid",      "bernstein.eps",          "bounds.delta1",
      "bounds.L",              "bounds.sigma",           "bounds.p",
      "bounds.T",              "bounds.n",               "bounds.delta",
      "bounds.eta"};
  return keys;
}

bool looks_like_algorithm_key(const std::string& key) {
  if (key.rfind("alg.", 0) != 0) return false;
  const auto last_dot = key.find_last_of('.');
  return last_dot > 3 && last_dot + 1 < key.size();
}

// Tracks which raw entries have been consumed, applies typed range checks,
// and accumulates the canonical echo of every effective key.
class Resolver {
 public:
  explicit Resolver(const RawConfig& raw) : origin_(raw.origin), entries_(raw.entries) {
    std::set<std::string> seen;
    for (const RawConfigEntry& e : entries_) {
      if (!seen.insert(e.key).second)
        throw ConfigError(at(e.line) + "duplicate key '" + e.key + "'");
    }
    consumed_.assign(entries_.size(), false);
  }

  std::string at(int line) const { return origin_ + ":" + std::to_string(line) + ": "; }

  const RawConfigEntry* find(const std::string& key) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (!consumed_[i] && entries_[i].key == key) {
        consumed_[i] = true;
        return &entries_[i];
      }
    }
    return nullptr;
  }

  void echo(const std::string& key, const std::string& value, const std::string& source) {
    resolved_.values[key] = value;
    resolved_.sources[key] = source;
  }

  void reject(const std::string& key, const std::string& reason) {
    if (const RawConfigEntry* e = find(key)) throw ConfigError(at(e->line) + "key '" + key + "' " + reason);
  }

  std::uint64_t take_u64(const std::string& key, std::uint64_t def) {
    const RawConfigEntry* e = find(key);
    if (!e) {
      echo(key, std::to_string(def), "default");
      return def;
    }
    std::uint64_t v = 0;
    if (!parse_u64_strict(e->value, v))
      throw ConfigError(at(e->line) + "key '" + key + "': '" + e->value + "' is not an unsigned integer");
    echo(key, std::to_string(v), "file");
    return v;
  }

  int take_int(const std::string& key, int def, int min_value) {
    const RawConfigEntry* e = find(key);
    if (!e) {
      echo(key, std::to_string(def), "default");
      return def;
    }
    long long v = 0;
    if (!parse_int_strict(e->value, v))
      throw ConfigError(at(e->line) + "key '" + key + "': '" + e->value + "' is not an integer");
    if (v < min_value || v > 2000000000LL)
      throw ConfigError(at(e->line) + "key '" + key + "': value must be >= " + std::to_string(min_value));
    echo(key, std::to_string(v), "file");
    return static_cast<int>(v);
  }

  double take_double(const std::string& key, double def, const std::function<bool(double)>& ok,
                     const std::string& range_desc) {
    const RawConfigEntry* e = find(key);
    if (!e) {
      echo(key, format_g17(def), "default");
      return def;
    }
    double v = 0;
    if (!parse_double_strict(e->value, v))
      throw ConfigError(at(e->line) + "key '" + key + "': '" + e->value + "' is not a number");
    if (!ok(v))
      throw ConfigError(at(e->line) + "key '" + key + "': value must be " + range_desc);
    echo(key, format_g17(v), "file");
    return v;
  }

  double require_double(const std::string& key, const std::function<bool(double)>& ok,
                        const std::string& range_desc) {
    if (!present(key)) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    return take_double(key, 0.0, ok, range_desc);
  }

  long long require_int(const std::string& key, long long min_value) {
    const RawConfigEntry* e = find(key);
    if (!e) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    long long v = 0;
    if (!parse_int_strict(e->value, v))
      throw ConfigError(at(e->line) + "key '" + key + "': '" + e->value + "' is not an integer");
    if (v < min_value)
      throw ConfigError(at(e->line) + "key '" + key + "': value must be >= " + std::to_string(min_value));
    echo(key, std::to_string(v), "file");
    return v;
  }

  std::string take_enum(const std::string& key, const std::string& def,
                        const std::vector<std::string>& allowed) {
    const RawConfigEntry* e = find(key);
    if (!e) {
      echo(key, def, "default");
      return def;
    }
    if (std::find(allowed.begin(), allowed.end(), e->value) == allowed.end()) {
      std::string opts;
      for (const std::string& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
      throw ConfigError(at(e->line) + "key '" + key + "': '" + e->value + "' is not one of {" + opts + "}");
    }
    echo(key, e->value, "file");
    return e->value;
  }

  std::vector<double> take_double_list(const std::string& key, const std::vector<double>& def,
                                       const std::function<bool(double)>& ok,
                                       const std::string& range_desc) {
    const RawConfigEntry* e = find(key);
    std::vector<double> out;
    if (!e) {
      out = def;
    } else {
      for (const std::string& item : split_list(e->value)) {
        double v = 0;
        if (!parse_double_strict(item, v))
          throw ConfigError(at(e->line) + "key '" + key + "': '" + item + "' is not a number");
        if (!ok(v)) throw ConfigError(at(e->line) + "key '" + key + "': every value must be " + range_desc);
        out.push_back(v);
      }
      if (out.empty()) throw ConfigError(at(e->line) + "key '" + key + "': empty list");
    }
    std::string joined;
    for (double v : out) joined += (joined.empty() ? "" : ",") + format_g17(v);
    echo(key, joined, e ? "file" : "default");
    return out;
  }

  std::vector<int> take_int_list(const std::string& key, const std::vector<int>& def, int min_value) {
    const RawConfigEntry* e = find(key);
    std::vector<int> out;
    if (!e) {
      out = def;
    } else {
      for (const std::string& item : split_list(e->value)) {
        long long v = 0;
        if (!parse_int_strict(item, v))
          throw ConfigError(at(e->line) + "key '" + key + "': '" + item + "' is not an integer");
        if (v < min_value || v > 2000000000LL)
          throw ConfigError(at(e->line) + "key '" + key + "': every value must be >= " + std::to_string(min_value));
        out.push_back(static_cast<int>(v));
      }
      if (out.empty()) throw ConfigError(at(e->line) + "key '" + key + "': empty list");
    }
    std::string joined;
    for (int v : out) joined += (joined.empty() ? "" : ",") + std::to_string(v);
    echo(key, joined, e ? "file" : "default");
    return out;
  }

  bool present(const std::string& key) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (!consumed_[i] && entries_[i].key == key) return true;
    return false;
  }

  // Uncons consumed entries whose key starts with prefix, in file order.
  std::vector<RawConfigEntry> take_prefixed(const std::string& prefix) {
    std::vector<RawConfigEntry> out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (!consumed_[i] && entries_[i].key.rfind(prefix, 0) == 0) {
        consumed_[i] = true;
        out.push_back(entries_[i]);
      }
    }
    return out;
  }

  void finish(const std::string& context) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (consumed_[i]) continue;
      const RawConfigEntry& e = entries_[i];
      if (global_known_keys().count(e.key) || looks_like_algorithm_key(e.key))
        throw ConfigError(at(e.line) + "key '" + e.key + "' is not used by " + context);
      throw ConfigError(at(e.line) + "unknown key '" + e.key + "'");
    }
  }

  ResolvedConfig&& resolved() {
    std::string canonical;
    for (const auto& [k, v] : resolved_.values) canonical += k + "=" + v + "\n";
    resolved_.hash = sha1_hex(canonical);
    return std::move(resolved_);
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::vector<RawConfigEntry> entries_;
  std::vector<bool> consumed_;
  ResolvedConfig resolved_;
};

const std::function<bool(double)> kPositive = [](double v) { return v > 0.0; };
const std::function<bool(double)> kNonNegative = [](double v) { return v >= 0.0; };
const std::function<bool(double)> kOpenUnit = [](double v) { return v > 0.0 && v < 1.0; };

struct KindDefaults {
  int replicates = 10;
  int steps = 2000;
  double eta = 0.01;
};

KindDefaults defaults_for(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConvergence: return {10, 2000, 0.01};
    case ExperimentKind::kQuantile: return {10000, 100, 0.01};
    case ExperimentKind::kLemmaB1: return {10000, 0, 0.0};
    case ExperimentKind::kLemmaC1: return {100000, 0, 0.0};
    case ExperimentKind::kPropB1: return {100, 100, 0.25};
    case ExperimentKind::kAccumCompare: return {10, 500, 0.01};
    case ExperimentKind::kBernstein: return {100000, 0, 0.0};
  }
  throw std::logic_error("unknown experiment kind");
}

void resolve_problem_and_noise(Resolver& r, ExperimentSpec& spec) {
  r.take_enum("problem.kind", "quadratic", {"quadratic"});
  spec.dim = r.take_int("problem.dim", 10, 1);
  const std::string nk =
      r.take_enum("noise.kind", "symmetrized-pareto", {"none", "gaussian", "symmetrized-pareto"});
  spec.noise.kind = noise_kind_from_string(nk);
  spec.noise.dim = spec.dim;
  switch (spec.noise.kind) {
    case NoiseKind::kSymmetrizedPareto:
      spec.noise.tail_index =
          r.take_double("noise.p", 1.5, [](double v) { return v > 1.0; }, "> 1");
      spec.noise.scale = r.take_double("noise.scale", 1.0, kPositive, "> 0");
      r.reject("noise.std", "only applies to gaussian noise");
      break;
    case NoiseKind::kGaussian:
      spec.noise.std_dev = r.take_double("noise.std", 1.0, kPositive, "> 0");
      r.reject("noise.p", "only applies to symmetrized-pareto noise");
      r.reject("noise.scale", "only applies to symmetrized-pareto noise");
      break;
    case NoiseKind::kNone:
      r.reject("noise.p", "does not apply to noiseless runs");
      r.reject("noise.scale", "does not apply to noiseless runs");
      r.reject("noise.std", "does not apply to noiseless runs");
      break;
  }
}

void resolve_optimizer(Resolver& r, ExperimentSpec& spec, const KindDefaults& defs,
                       bool raw_step_only) {
  spec.optimizer.eta = r.take_double("optimizer.eta", defs.eta, kPositive, "> 0");
  spec.optimizer.steps = r.take_int("optimizer.steps", defs.steps, 1);
  const std::string sched =
      r.take_enum("optimizer.schedule", "constant", {"constant", "warmup-cosine"});
  spec.optimizer.schedule = schedule_from_string(sched);
  if (spec.optimizer.schedule == StepSchedule::kWarmupCosine) {
    spec.optimizer.warmup_steps = r.take_int("optimizer.warmup_steps", 500, 1);
    spec.optimizer.floor_fraction = r.take_double(
        "optimizer.floor_fraction", 0.1, [](double v) { return v >= 0.0 && v <= 1.0; }, "in [0, 1]");
  } else {
    r.reject("optimizer.warmup_steps", "only applies to the warmup-cosine schedule");
    r.reject("optimizer.floor_fraction", "only applies to the warmup-cosine schedule");
  }
  spec.optimizer.momentum = r.take_double(
      "optimizer.momentum", 0.0, [](double v) { return v >= 0.0 && v < 1.0; }, "in [0, 1)");
  spec.optimizer.weight_decay = r.take_double("optimizer.weight_decay", 0.0, kNonNegative, ">= 0");
  if (raw_step_only && (spec.optimizer.momentum != 0.0 || spec.optimizer.weight_decay != 0.0))
    throw ConfigError(r.origin() +
                      ": the raw-step descent check requires optimizer.momentum = 0 and "
                      "optimizer.weight_decay = 0");
}

EstimatorConfig resolve_estimator_base(Resolver& r) {
  EstimatorConfig base;
  base.alpha = r.take_double("estimator.alpha", 1.0, kPositive, "> 0");
  base.beta = r.take_double(
      "estimator.beta", 1.0, [](double v) { return v >= 1.0 && v <= 2.0; }, "in [1, 2]");
  base.gamma = r.take_double("estimator.gamma", 1.0, kPositive, "> 0");
  base.batch_size = r.take_int("estimator.batch_size", 64, 1);
  return base;
}

void resolve_algorithms(Resolver& r, ExperimentSpec& spec) {
  const EstimatorConfig base = resolve_estimator_base(r);

  std::vector<std::string> names;
  const RawConfigEntry* list_entry = r.find("experiment.algorithms");
  const RawConfigEntry* mode_entry = r.find("estimator.mode");
  if (list_entry && mode_entry)
    throw ConfigError(r.at(mode_entry->line) +
                      "estimator.mode and experiment.algorithms are mutually exclusive");
  if (list_entry) {
    for (const std::string& item : split_list(list_entry->value)) names.push_back(item);
  } else if (mode_entry) {
    names.push_back(mode_entry->value);
  } else {
    names = {"ps-clip-increasing", "global-clip", "normalize"};
  }

  std::set<std::string> seen;
  for (const std::string& name : names) {
    EstimatorMode mode;
    try {
      mode = estimator_mode_from_string(name);
    } catch (const std::invalid_argument& err) {
      const int line = list_entry ? list_entry->line : (mode_entry ? mode_entry->line : 0);
      throw ConfigError(r.at(line) + err.what());
    }
    if (!seen.insert(name).second)
      throw ConfigError(r.origin() + ": algorithm '" + name + "' listed twice");
    AlgorithmConfig alg;
    alg.name = name;
    alg.estimator = base;
    alg.estimator.mode = mode;
    alg.eta = spec.optimizer.eta;
    spec.algorithms.push_back(alg);
  }

  std::string joined;
  for (const std::string& n : names) joined += (joined.empty() ? "" : ",") + n;
  r.echo("experiment.algorithms", joined, list_entry || mode_entry ? "file" : "default");

  // Per-algorithm overrides: alg.<mode>.<eta|alpha|beta|gamma>.
  for (const RawConfigEntry& e : r.take_prefixed("alg.")) {
    const auto last_dot = e.key.find_last_of('.');
    if (last_dot <= 4 || last_dot + 1 >= e.key.size())
      throw ConfigError(r.at(e.line) + "unknown key '" + e.key + "'");
    const std::string name = e.key.substr(4, last_dot - 4);
    const std::string param = e.key.substr(last_dot + 1);
    auto alg = std::find_if(spec.algorithms.begin(), spec.algorithms.end(),
                            [&name](const AlgorithmConfig& a) { return a.name == name; });
    if (alg == spec.algorithms.end())
      throw ConfigError(r.at(e.line) + "key '" + e.key + "': algorithm '" + name +
                        "' is not part of this experiment");
    double v = 0;
    if (!parse_double_strict(e.value, v))
      throw ConfigError(r.at(e.line) + "key '" + e.key + "': '" + e.value + "' is not a number");
    if (param == "eta") {
      if (!(v > 0.0)) throw ConfigError(r.at(e.line) + "key '" + e.key + "': value must be > 0");
      alg->eta = v;
    } else if (param == "alpha") {
      if (!(v > 0.0)) throw ConfigError(r.at(e.line) + "key '" + e.key + "': value must be > 0");
      alg->estimator.alpha = v;
    } else if (param == "beta") {
      if (!(v >= 1.0 && v <= 2.0))
        throw ConfigError(r.at(e.line) + "key '" + e.key + "': value must be in [1, 2]");
      alg->estimator.beta = v;
    } else if (param == "gamma") {
      if (!(v > 0.0)) throw ConfigError(r.at(e.line) + "key '" + e.key + "': value must be > 0");
      alg->estimator.gamma = v;
    } else {
      throw ConfigError(r.at(e.line) + "key '" + e.key + "': '" + param +
                        "' is not an overridable parameter (eta, alpha, beta, gamma)");
    }
    r.echo(e.key, format_g17(v), "file");
  }
}

void check_quantiles_resolvable(const ExperimentSpec& spec, const std::string& origin) {
  double min_delta = 1.0;
  for (double d : spec.quantile_deltas) min_delta = std::min(min_delta, d);
  if (static_cast<double>(spec.replicates) * min_delta < 1.0 - 1e-12) {
    std::ostringstream msg;
    msg << origin << ": quantile unresolvable: delta = " << min_delta << " needs at least "
        << static_cast<long long>(std::ceil(1.0 / min_delta)) << " replicates, got "
        << spec.replicates;
    throw ConfigError(msg.str());
  }
}

}  // namespace

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "convergence") return ExperimentKind::kConvergence;
  if (s == "quantile") return ExperimentKind::kQuantile;
  if (s == "lemma-b1") return ExperimentKind::kLemmaB1;
  if (s == "lemma-c1") return ExperimentKind::kLemmaC1;
  if (s == "prop-b1") return ExperimentKind::kPropB1;
  if (s == "accum-compare") return ExperimentKind::kAccumCompare;
  if (s == "bernstein") return ExperimentKind::kBernstein;
  throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

RawConfig parse_raw_config(std::string_view text, const std::string& origin) {
  RawConfig raw;
  raw.origin = origin;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line_view =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    const std::string line = trim(line_view);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value', got '" +
                        line + "'");
    RawConfigEntry entry;
    entry.key = trim(line.substr(0, eq));
    entry.value = trim(line.substr(eq + 1));
    entry.line = line_no;
    if (!valid_key(entry.key))
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed key '" + entry.key + "'");
    if (entry.value.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": key '" + entry.key +
                        "' has an empty value");
    raw.entries.push_back(std::move(entry));
  }
  return raw;
}

RawConfig load_raw_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_raw_config(buf.str(), path);
}

ExperimentSpec resolve_experiment_config(const RawConfig& raw, ExperimentKind kind,
                                         const CliOverrides& overrides) {
  Resolver r(raw);
  ExperimentSpec spec;
  spec.kind = kind;
  const KindDefaults defs = defaults_for(kind);

  if (const RawConfigEntry* e = r.find("experiment.kind")) {
    ExperimentKind file_kind;
    try {
      file_kind = experiment_kind_from_string(e->value);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(r.at(e->line) + err.what());
    }
    if (file_kind != kind)
      throw ConfigError(r.at(e->line) + "experiment.kind '" + e->value +
                        "' does not match the subcommand ('" + to_string(kind) + "')");
    r.echo("experiment.kind", e->value, "file");
  } else {
    r.echo("experiment.kind", to_string(kind), "default");
  }

  {
    const RawConfigEntry* e = r.find("experiment.seed");
    if (overrides.seed) {
      spec.master_seed = *overrides.seed;
      r.echo("experiment.seed", std::to_string(spec.master_seed), "cli");
    } else if (e) {
      std::uint64_t v = 0;
      if (!parse_u64_strict(e->value, v))
        throw ConfigError(r.at(e->line) + "key 'experiment.seed': '" + e->value +
                          "' is not an unsigned integer");
      spec.master_seed = v;
      r.echo("experiment.seed", std::to_string(v), "file");
    } else {
      spec.master_seed = 9037;
      r.echo("experiment.seed", "9037", "default");
    }
  }

  {
    const RawConfigEntry* e = r.find("experiment.replicates");
    if (overrides.replicates) {
      if (*overrides.replicates < 1) throw ConfigError("--replicates must be >= 1");
      spec.replicates = *overrides.replicates;
      r.echo("experiment.replicates", std::to_string(spec.replicates), "cli");
    } else if (e) {
      long long v = 0;
      if (!parse_int_strict(e->value, v) || v < 1 || v > 2000000000LL)
        throw ConfigError(r.at(e->line) + "key 'experiment.replicates': value must be a positive integer");
      spec.replicates = static_cast<int>(v);
      r.echo("experiment.replicates", std::to_string(v), "file");
    } else {
      spec.replicates = defs.replicates;
      r.echo("experiment.replicates", std::to_string(defs.replicates), "default");
    }
  }

  switch (kind) {
    case ExperimentKind::kConvergence:
      resolve_problem_and_noise(r, spec);
      resolve_optimizer(r, spec, defs, /*raw_step_only=*/false);
      resolve_algorithms(r, spec);
      break;
    case ExperimentKind::kQuantile:
      resolve_problem_and_noise(r, spec);
      resolve_optimizer(r, spec, defs, /*raw_step_only=*/false);
      resolve_algorithms(r, spec);
      spec.quantile_deltas = r.take_double_list(
          "quantile.deltas", {0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0001},
          kOpenUnit, "in (0, 1)");
      check_quantiles_resolvable(spec, r.origin());
      break;
    case ExperimentKind::kLemmaB1:
      spec.lemma_p = r.take_double(
          "lemma.p", 1.5, [](double v) { return v > 1.0 && v <= 2.0; }, "in (1, 2]");
      spec.lemma_n_grid = r.take_int_list("lemma.n_grid", {1, 4, 16, 64, 256, 1024}, 1);
      break;
    case ExperimentKind::kLemmaC1: {
      spec.lemma_p = r.take_double(
          "lemma.p", 1.5, [](double v) { return v > 1.0 && v <= 2.0; }, "in (1, 2]");
      spec.lemma_n = r.take_int("lemma.n", 64, 1);
      spec.lemma_deltas =
          r.take_double_list("lemma.deltas", {0.2, 0.1, 0.05, 0.01}, kOpenUnit, "in (0, 1)");
      double min_delta = 1.0;
      for (double d : spec.lemma_deltas) min_delta = std::min(min_delta, d);
      if (static_cast<double>(spec.replicates) * min_delta < 10.0 - 1e-9) {
        std::ostringstream msg;
        msg << r.origin() << ": confidence check needs at least "
            << static_cast<long long>(std::ceil(10.0 / min_delta)) << " replicates to resolve delta = "
            << min_delta << ", got " << spec.replicates;
        throw ConfigError(msg.str());
      }
      break;
    }
    case ExperimentKind::kPropB1:
      resolve_problem_and_noise(r, spec);
      resolve_optimizer(r, spec, defs, /*raw_step_only=*/true);
      {
        EstimatorConfig base = resolve_estimator_base(r);
        base.mode = EstimatorMode::kPsClipIncreasing;
        spec.optimizer.estimator = base;
      }
      spec.optimizer.enforce_step_limit = true;
      if (r.present("estimator.mode"))
        r.reject("estimator.mode", "is not used: the descent check exercises every estimator mode");
      break;
    case ExperimentKind::kAccumCompare:
      resolve_problem_and_noise(r, spec);
      resolve_optimizer(r, spec, defs, /*raw_step_only=*/false);
      spec.accum.micro_batch = r.take_int("accum.m", 8, 1);
      spec.accum.steps = r.take_int("accum.k", 8, 1);
      spec.accum.gamma = r.take_double("accum.gamma", 1.0, kPositive, "> 0");
      r.reject("accum.placement", "is not used: this experiment always runs both placements");
      break;
    case ExperimentKind::kBernstein:
      spec.bernstein_dim = r.take_int("bernstein.dim", 3, 1);
      spec.bernstein_cap = r.take_double("bernstein.cap", 4.0, kPositive, "> 0");
      spec.bernstein_n_grid = r.take_int_list("bernstein.n_grid", {10, 100}, 1);
      spec.bernstein_eps =
          r.take_double_list("bernstein.eps", {0.5, 1.0, 1.5, 2.0, 3.0}, kPositive, "> 0");
      break;
  }

  r.finish(std::string("experiment kind '") + to_string(kind) + "'");
  spec.resolved = r.resolved();
  return spec;
}

BoundsRequest resolve_bounds_config(const RawConfig& raw) {
  Resolver r(raw);
  BoundsRequest req;
  req.inputs.delta1 = r.require_double("bounds.delta1", kNonNegative, ">= 0");
  req.inputs.smoothness = r.take_double("bounds.L", 1.0, kPositive, "> 0");
  req.inputs.sigma = r.require_double("bounds.sigma", kPositive, "> 0");
  req.inputs.p = r.require_double(
      "bounds.p", [](double v) { return v > 1.0 && v <= 2.0; }, "in (1, 2]");
  req.inputs.steps = r.require_int("bounds.T", 1);
  req.inputs.batch = r.require_int("bounds.n", 1);
  if (const RawConfigEntry* e = r.find("bounds.delta")) {
    double v = 0;
    if (!parse_double_strict(e->value, v))
      throw ConfigError(r.at(e->line) + "key 'bounds.delta': '" + e->value + "' is not a number");
    if (!(v > 0.0 && v < 1.0))
      throw ConfigError(r.at(e->line) + "key 'bounds.delta': value must be in (0, 1)");
    req.inputs.delta = v;
    req.has_delta = true;
    r.echo("bounds.delta", format_g17(v), "file");
  }
  if (const RawConfigEntry* e = r.find("bounds.eta")) {
    double v = 0;
    if (!parse_double_strict(e->value, v) || !(v > 0.0))
      throw ConfigError(r.at(e->line) + "key 'bounds.eta': value must be a number > 0");
    if (req.inputs.steps > 10000000LL)
      throw ConfigError(r.at(e->line) + "key 'bounds.eta': explicit step sizes need T <= 1e7");
    req.inputs.etas.assign(static_cast<std::size_t>(req.inputs.steps), v);
    r.echo("bounds.eta", format_g17(v), "file");
  }
  r.finish("the bounds calculator");
  req.resolved = r.resolved();
  return req;
}

}  // namespace htopt
