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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gtvr/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decentralized variance-reduced optimization experiments"};
  app.require_subcommand(1, 1);

  gtvr::cli::Options options;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", options.config_path, "Config file (TOML-style)");
    cmd->add_option("--set", options.sets, "Override a config field, KEY=VALUE (repeatable)");
    cmd->add_option("--out", options.out_dir, "Output directory");
    cmd->add_option("--seed", seed, "Run seed (overrides run.seed)");
    cmd->add_option("--jobs", jobs, "Worker threads (overrides run.jobs)");
  };

  auto* run = app.add_subcommand("run", "Run one experiment");
  add_common(run);

  auto* sweep = app.add_subcommand("sweep", "Run one experiment per value of a config field");
  add_common(sweep);
  std::string axis;
  std::vector<std::string> values;
  sweep->add_option("--axis", axis, "Config field to vary")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

  auto* speedup = app.add_subcommand("speedup", "Centralized vs decentralized gradient-count study");
  add_common(speedup);

  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  bool corrupt = false;
  verify->add_flag("--inject-corrupt-weights", corrupt, "Negative control: corrupt one mixing weight");

  auto* plot = app.add_subcommand("plot", "Render trace CSVs as SVG figures");
  std::vector<std::string> traces;
  std::string plot_out = "plots";
  std::string style = "epoch";
  plot->add_option("traces", traces, "Trace CSV files")->required();
  plot->add_option("--out", plot_out, "Output directory");
  plot->add_option("--style", style, "x axis: epoch or iter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gtvr::cli::kConfigError;
  }

  for (CLI::App* cmd : {run, sweep, speedup}) {
    if (cmd->parsed()) {
      if (cmd->count("--seed") > 0) options.seed = seed;
      if (cmd->count("--jobs") > 0) options.jobs = jobs;
    }
  }

  if (run->parsed()) return gtvr::cli::cmd_run(options, std::cerr);
  if (sweep->parsed()) return gtvr::cli::cmd_sweep(options, axis, values, std::cerr);
  if (speedup->parsed()) return gtvr::cli::cmd_speedup(options, std::cerr);
  if (verify->parsed()) return gtvr::cli::cmd_verify({corrupt}, std::cout);
  return gtvr::cli::cmd_plot(traces, plot_out, style, std::cerr);
}
