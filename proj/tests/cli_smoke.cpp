// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end smoke tests: drive the installed binary through a shell the way
// a user would, and check exit codes, stdout JSON, and on-disk artifacts.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = HTOPT_CLI_PATH;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  REQUIRE(out.good());
}

// Runs `prefix cli args` under the shell, capturing stdout/stderr.
RunResult run_cli(const std::string& args, const std::string& prefix = "") {
  static int counter = 0;
  const fs::path dir = fs::path("scratch_cli") / ("capture" + std::to_string(counter++));
  fs::create_directories(dir);
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd =
      prefix + kCli + " " + args + " > " + out.string() + " 2> " + err.string();
  const int rc = std::system(cmd.c_str());
  RunResult res;
  res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path("scratch_cli") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("bounds --help").code == 0);
}

TEST_CASE("bounds subcommand prints the applicable guarantees as json") {
  const fs::path dir = scratch("bounds");
  write_file(dir / "bounds.cfg",
             "bounds.delta1 = 1\nbounds.sigma = 1\nbounds.p = 2\nbounds.T = 100\nbounds.n = 100\n");
  const RunResult res = run_cli("bounds --config " + (dir / "bounds.cfg").string());
  REQUIRE(res.code == 0);
  const nlohmann::json j = nlohmann::json::parse(res.out);
  CHECK(j.at("cor1_n") == 100);
  CHECK(j.contains("thm1"));
  CHECK(j.contains("cor1"));
  // Without a confidence level the high-probability results are omitted.
  CHECK_FALSE(j.contains("thm2"));
  CHECK_FALSE(j.contains("cor2"));

  write_file(dir / "with_delta.cfg",
             "bounds.delta1 = 1\nbounds.sigma = 1\nbounds.p = 2\nbounds.T = 100\nbounds.n = 100\n"
             "bounds.delta = 0.01\n");
  const RunResult res2 = run_cli("bounds --config " + (dir / "with_delta.cfg").string());
  REQUIRE(res2.code == 0);
  const nlohmann::json j2 = nlohmann::json::parse(res2.out);
  CHECK(j2.contains("thm2"));
  CHECK(j2.contains("cor2"));   // n matches the recommended batch size here
  CHECK(j2.contains("remark"));  // delta is small enough for the squared-log form
  CHECK(j2.at("cor1_n") == 100);
}

TEST_CASE("bounds writes a json artifact when asked") {
  const fs::path dir = scratch("bounds_out");
  write_file(dir / "bounds.cfg",
             "bounds.delta1 = 1\nbounds.sigma = 1\nbounds.p = 2\nbounds.T = 100\nbounds.n = 100\n");
  const RunResult res = run_cli("bounds --config " + (dir / "bounds.cfg").string() + " --out " +
                                (dir / "result").string());
  REQUIRE(res.code == 0);
  const fs::path artifact = dir / "result" / "bounds.json";
  REQUIRE(fs::exists(artifact));
  const nlohmann::json j = nlohmann::json::parse(slurp(artifact));
  CHECK(j.at("cor1_n") == 100);
  CHECK(j.at("config").at("bounds.T") == "100");
  CHECK(j.at("config_hash").is_string());
}

TEST_CASE("a missing config file is a usage error") {
  const RunResult res = run_cli("bounds --config scratch_cli/does_not_exist.cfg");
  CHECK(res.code == 2);
}

TEST_CASE("a bad key is reported with its name on stderr") {
  const fs::path dir = scratch("badkey");
  write_file(dir / "bad.cfg",
             "bounds.delta1 = 1\nbounds.sigma = 1\nbounds.p = 2\nbounds.T = 100\nbounds.n = 100\n"
             "bounds.sgima = 1\n");
  const RunResult res = run_cli("bounds --config " + (dir / "bad.cfg").string());
  CHECK(res.code == 2);
  CHECK(res.err.find("bounds.sgima") != std::string::npos);
  CHECK(res.err.find(":6") != std::string::npos);
}

TEST_CASE("an out-of-range tail exponent is a usage error") {
  const fs::path dir = scratch("badp");
  write_file(dir / "bad.cfg",
             "bounds.delta1 = 1\nbounds.sigma = 1\nbounds.p = 3\nbounds.T = 100\nbounds.n = 100\n");
  const RunResult res = run_cli("bounds --config " + (dir / "bad.cfg").string());
  CHECK(res.code == 2);
  CHECK(res.err.find("bounds.p") != std::string::npos);
}

TEST_CASE("a config written for one experiment cannot drive another") {
  const fs::path dir = scratch("kind_mismatch");
  write_file(dir / "quantile.cfg", "experiment.kind = quantile\n");
  const RunResult res = run_cli("bench-convergence --config " + (dir / "quantile.cfg").string() +
                                " --out " + (dir / "out").string());
  CHECK(res.code == 2);
  CHECK(res.err.find("does not match") != std::string::npos);
}

TEST_CASE("a tiny tail validation passes and writes its summary") {
  const fs::path dir = scratch("validate_tail");
  write_file(dir / "tail.cfg", "bernstein.n_grid = 5\nbernstein.eps = 2, 3\n");
  const RunResult res = run_cli("validate bernstein --config " + (dir / "tail.cfg").string() +
                                " --out " + (dir / "out").string() + " --replicates 200");
  REQUIRE(res.code == 0);
  CHECK(res.out.find("PASSED") != std::string::npos);
  REQUIRE(fs::exists(dir / "out" / "summary.json"));
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(j.at("results").at("passed") == true);
}

TEST_CASE("benchmark runs are reproducible byte for byte") {
  const fs::path dir = scratch("repro");
  write_file(dir / "small.cfg",
             "problem.dim = 3\n"
             "optimizer.steps = 5\n"
             "estimator.batch_size = 4\n"
             "estimator.mode = ps-clip-increasing\n"
             "experiment.replicates = 2\n");
  const std::string base = "bench-convergence --config " + (dir / "small.cfg").string();

  const RunResult a = run_cli(base + " --out " + (dir / "a").string());
  REQUIRE(a.code == 0);
  REQUIRE(fs::exists(dir / "a" / "summary.json"));
  REQUIRE(fs::exists(dir / "a" / "curve_ps-clip-increasing.dat"));

  const RunResult b = run_cli(base + " --out " + (dir / "b").string());
  REQUIRE(b.code == 0);
  CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "b" / "summary.json"));
  CHECK(slurp(dir / "a" / "curve_ps-clip-increasing.dat") ==
        slurp(dir / "b" / "curve_ps-clip-increasing.dat"));

  // The worker count is an execution detail, not part of the result.
  const RunResult c = run_cli(base + " --out " + (dir / "c").string(), "HTOPT_WORKERS=3 ");
  REQUIRE(c.code == 0);
  CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "c" / "summary.json"));
  CHECK(slurp(dir / "a" / "trace_ps-clip-increasing_rep1.csv") ==
        slurp(dir / "c" / "trace_ps-clip-increasing_rep1.csv"));
}

TEST_CASE("seed overrides change the drawn sample path") {
  const fs::path dir = scratch("seed_override");
  write_file(dir / "small.cfg",
             "problem.dim = 3\n"
             "optimizer.steps = 5\n"
             "estimator.batch_size = 4\n"
             "estimator.mode = ps-clip-increasing\n"
             "experiment.replicates = 2\n");
  const std::string base = "bench-convergence --config " + (dir / "small.cfg").string();
  const RunResult a = run_cli(base + " --out " + (dir / "a").string());
  const RunResult b = run_cli(base + " --seed 123 --out " + (dir / "b").string());
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(slurp(dir / "a" / "summary.json") != slurp(dir / "b" / "summary.json"));
}
