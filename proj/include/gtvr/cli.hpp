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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gtvr/config.hpp"
#include "gtvr/verify.hpp"

namespace gtvr::cli {

// Stable exit codes for scripting.
enum ExitCode : int { kSuccess = 0, kConfigError = 1, kDivergence = 2, kOracleFailure = 3 };

struct Options {
  std::string config_path;  // empty: built-in defaults
  std::vector<std::string> sets;  // "key=value"
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  bool use_environment = true;
};

// Config file, then GTVR_* environment, then --set, then --seed/--jobs.
Settings load_settings(const Options& options);

int cmd_run(const Options& options, std::ostream& log);
int cmd_sweep(const Options& options, const std::string& axis, const std::vector<std::string>& values,
              std::ostream& log);
int cmd_speedup(const Options& options, std::ostream& log);
int cmd_verify(const VerifyOptions& options, std::ostream& out);
int cmd_plot(const std::vector<std::string>& traces, const std::string& out_dir, const std::string& style,
             std::ostream& log);

}  // namespace gtvr::cli
