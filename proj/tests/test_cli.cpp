// Copyright 2026 The GT-VR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gtvr/cli.hpp"
#include "gtvr/engine.hpp"
#include "gtvr/errors.hpp"
#include "gtvr/plot.hpp"

using namespace gtvr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("gtvr_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

MetricsTrace load(const fs::path& p) {
  std::ifstream in(p);
  return read_trace_csv(in);
}

cli::Options quadratic_options(const fs::path& dir, const std::string& out) {
  const fs::path cfg = dir / "quad.toml";
  std::ofstream(cfg) << "[objective]\ntype = \"quadratic\"\n[network]\nnodes = 4\n[algorithm]\nalpha = 0.05\n"
                        "[run]\niterations = 300\n";
  cli::Options o;
  o.config_path = cfg.string();
  o.out_dir = (dir / out).string();
  o.use_environment = false;
  return o;
}

}  // namespace

TEST_CASE("run writes a trace and provenance") {
  TempDir tmp("run");
  std::ostringstream log;
  auto o = quadratic_options(tmp.path, "a");
  REQUIRE(cli::cmd_run(o, log) == cli::kSuccess);
  const auto trace = load(tmp.path / "a" / "trace.csv");
  REQUIRE(trace.records.size() >= 2);
  for (std::size_t i = 1; i < trace.records.size(); ++i) CHECK(trace.records[i].iter > trace.records[i - 1].iter);
  const auto prov = nlohmann::json::parse(slurp(tmp.path / "a" / "trace.json"));
  CHECK(prov.contains("config"));
  CHECK(prov.contains("sigma"));
  CHECK(prov.contains("seeds"));
  CHECK(prov.contains("git_describe"));

  o.out_dir = (tmp.path / "b").string();
  REQUIRE(cli::cmd_run(o, log) == cli::kSuccess);
  CHECK(slurp(tmp.path / "a" / "trace.csv") == slurp(tmp.path / "b" / "trace.csv"));

  // Everything lands under the output directory.
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(tmp.path)) files += e.is_regular_file();
  CHECK(files == 5);
}

TEST_CASE("run exit codes") {
  TempDir tmp("codes");
  std::ostringstream log;
  auto o = quadratic_options(tmp.path, "out");
  o.sets = {"algorithm.alpha=0"};
  CHECK(cli::cmd_run(o, log) == cli::kConfigError);
  CHECK(log.str().find("alpha") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp.path / "out"));

  o.sets = {"algorithm.alpha=1e200"};
  CHECK(cli::cmd_run(o, log) == cli::kDivergence);

  o.sets = {"objective.type=logistic", "objective.dataset=/no/such/file.svm"};
  log.str("");
  CHECK(cli::cmd_run(o, log) == cli::kConfigError);
  CHECK(log.str().find("/no/such/file.svm") != std::string::npos);

  o.sets = {"network.nodez=3"};
  log.str("");
  CHECK(cli::cmd_run(o, log) == cli::kConfigError);
  CHECK(log.str().find("network.nodez") != std::string::npos);

  o.sets = {"run.iterations"};
  CHECK(cli::cmd_run(o, log) == cli::kConfigError);
}

TEST_CASE("seed and jobs flags override the file") {
  TempDir tmp("flags");
  auto o = quadratic_options(tmp.path, "out");
  o.seed = 99;
  o.jobs = 2;
  o.sets = {"run.seed=5"};
  const Settings s = cli::load_settings(o);
  CHECK(s.run.seed == 99);
  CHECK(s.run.jobs == 2);
}

TEST_CASE("topology sweep reports spectral gaps") {
  TempDir tmp("sweep");
  std::ostringstream log;
  auto o = quadratic_options(tmp.path, "sweep");
  o.sets = {"network.nodes=10", "algorithm.alpha=0.01", "run.iterations=4000", "sweep.threshold=1e-8"};
  REQUIRE(cli::cmd_sweep(o, "network.topology", {"ring", "exponential", "complete"}, log) == cli::kSuccess);
  std::istringstream summary(slurp(tmp.path / "sweep" / "summary.csv"));
  std::string line;
  std::getline(summary, line);
  CHECK(line == "value,sigma,final_gap,epochs_to_threshold,status");
  const double expected[] = {0.951, 0.6, 0.0};
  for (int i = 0; i < 3; ++i) {
    REQUIRE(std::getline(summary, line));
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 5);
    CHECK(std::abs(std::stod(cells[1]) - expected[i]) <= 1e-3);
    const auto trace = load(tmp.path / "sweep" / ("run_" + std::to_string(i) + ".csv"));
    const auto recomputed = epochs_to_threshold(trace, 1e-8);
    REQUIRE(recomputed);
    CHECK(std::stod(cells[3]) == *recomputed);
  }
}

TEST_CASE("sweep isolates failing runs") {
  TempDir tmp("sweep_alpha");
  std::ostringstream log;
  auto o = quadratic_options(tmp.path, "s");
  CHECK(cli::cmd_sweep(o, "algorithm.alpha", {"0.01", "0", "0.05"}, log) == cli::kConfigError);
  CHECK(fs::exists(tmp.path / "s" / "run_0.csv"));
  CHECK_FALSE(fs::exists(tmp.path / "s" / "run_1.csv"));
  CHECK(fs::exists(tmp.path / "s" / "run_2.csv"));
  REQUIRE(cli::cmd_sweep(o, "algorithm.alpha", {"0.01", "0.02", "0.05"}, log) == cli::kSuccess);
  for (int i = 0; i < 3; ++i) CHECK(fs::exists(tmp.path / "s" / ("run_" + std::to_string(i) + ".csv")));
  CHECK(cli::cmd_sweep(o, "algorithm.colour", {"1"}, log) == cli::kConfigError);
}

TEST_CASE("verify") {
  std::ostringstream out;
  CHECK(cli::cmd_verify({}, out) == cli::kSuccess);
  std::size_t suites = 0;
  std::istringstream lines(out.str());
  for (std::string l; std::getline(lines, l);) suites += l.rfind("PASS ", 0) == 0;
  CHECK(suites >= 6);

  std::ostringstream bad;
  CHECK(cli::cmd_verify({true}, bad) != cli::kSuccess);
  CHECK(bad.str().find("FAIL double_stochasticity") != std::string::npos);
}

TEST_CASE("speedup writes a table") {
  TempDir tmp("speedup");
  const fs::path cfg = tmp.path / "s.toml";
  std::ofstream(cfg) << "[objective]\nlambda = 1.0\n[synthetic]\nsamples = 400\n[run]\niterations = 100000\n"
                        "metrics_every = 50\n[speedup]\nnodes = [2]\nthreshold = 1e-10\n";
  cli::Options o;
  o.config_path = cfg.string();
  o.out_dir = (tmp.path / "out").string();
  o.use_environment = false;
  std::ostringstream log;
  REQUIRE(cli::cmd_speedup(o, log) == cli::kSuccess);
  CHECK(fs::exists(tmp.path / "out" / "central.csv"));
  CHECK(fs::exists(tmp.path / "out" / "nodes_2.csv"));
  CHECK(slurp(tmp.path / "out" / "speedup.csv").rfind("nodes,big_data,central_evals,node_evals,ratio\n", 0) == 0);
}

TEST_CASE("plot from trace files") {
  TempDir tmp("plot");
  std::ostringstream log;
  auto o = quadratic_options(tmp.path, "run");
  REQUIRE(cli::cmd_run(o, log) == cli::kSuccess);
  const std::string trace = (tmp.path / "run" / "trace.csv").string();
  REQUIRE(cli::cmd_plot({trace}, (tmp.path / "plots").string(), "epoch", log) == cli::kSuccess);
  for (const char* metric : {"gap", "consensus_err", "tracking_err", "msd"}) {
    const auto curves = parse_svg_curves(slurp(tmp.path / "plots" / (std::string(metric) + ".svg")));
    CHECK(curves.size() == 1);
  }
  CHECK(cli::cmd_plot({trace}, (tmp.path / "plots").string(), "wall", log) == cli::kConfigError);
  const fs::path empty = tmp.path / "empty.csv";
  std::ofstream(empty) << kTraceHeader << "\n";
  CHECK(cli::cmd_plot({empty.string()}, (tmp.path / "p2").string(), "iter", log) == cli::kConfigError);
}
