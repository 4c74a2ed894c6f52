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

#include "gtvr/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gtvr/engine.hpp"
#include "gtvr/errors.hpp"
#include "gtvr/parallel.hpp"
#include "gtvr/plot.hpp"

namespace gtvr::cli {
namespace {

namespace fs = std::filesystem;

ConfigDocument load_document(const Options& options) {
  ConfigDocument doc;
  if (!options.config_path.empty()) doc = ConfigDocument::parse_file(options.config_path);
  if (options.use_environment) doc.apply_environment(process_environment());
  for (const auto& s : options.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    doc.set(s.substr(0, eq), std::string_view(s).substr(eq + 1));
  }
  if (options.seed) doc.set("run.seed", std::to_string(*options.seed));
  if (options.jobs) doc.set("run.jobs", std::to_string(*options.jobs));
  return doc;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

void write_run_outputs(const fs::path& stem, const RunResult& result) {
  std::ostringstream csv;
  write_trace_csv(csv, result.trace);
  write_text(fs::path(stem).replace_extension(".csv"), csv.str());
  write_text(fs::path(stem).replace_extension(".json"), result.provenance.dump(2) + "\n");
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

// Maps library exceptions onto exit codes; divergence is reported by status.
template <typename Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const OracleError& e) {
    log << "oracle failure: " << e.what() << '\n';
    return kOracleFailure;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace

Settings load_settings(const Options& options) { return to_settings(load_document(options)); }

int cmd_run(const Options& options, std::ostream& log) {
  return guarded(log, [&] {
    const Settings settings = load_settings(options);
    fs::create_directories(options.out_dir);
    const RunResult result = run(settings.run);
    write_run_outputs(fs::path(options.out_dir) / "trace", result);
    const auto& last = result.trace.records.back();
    log << "iterations " << last.iter << ", epochs " << last.epoch << ", final gap " << last.gap << '\n';
    if (result.status == RunStatus::Diverged) {
      log << "diverged: " << result.diagnostic << '\n';
      return static_cast<int>(kDivergence);
    }
    return static_cast<int>(kSuccess);
  });
}

int cmd_sweep(const Options& options, const std::string& axis, const std::vector<std::string>& values,
              std::ostream& log) {
  return guarded(log, [&] {
    if (!is_config_key(axis)) throw ConfigError("sweep axis '" + axis + "' is not a config field");
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    const ConfigDocument base = load_document(options);
    const Settings base_settings = to_settings(base);
    fs::create_directories(options.out_dir);

    struct Outcome {
      int code = kSuccess;
      double sigma = std::numeric_limits<double>::quiet_NaN();
      double final_gap = std::numeric_limits<double>::quiet_NaN();
      std::optional<double> epochs;
      std::string status;
    };
    std::vector<Outcome> outcomes(values.size());
    WorkerPool pool(base_settings.run.jobs);
    pool.parallel_for(values.size(), [&](std::size_t idx) {
      Outcome& o = outcomes[idx];
      std::ostringstream sink;
      o.code = guarded(sink, [&] {
        ConfigDocument doc = base;
        doc.set(axis, values[idx]);
        Settings s = to_settings(doc);
        s.run.jobs = 1;
        const Problem problem = build_problem(s.run);
        o.sigma = problem.mixing.sigma;
        const RunResult result = run(s.run, problem);
        write_run_outputs(fs::path(options.out_dir) / ("run_" + std::to_string(idx)), result);
        o.final_gap = result.trace.records.back().gap;
        o.epochs = epochs_to_threshold(result.trace, s.sweep_threshold);
        o.status = result.provenance["status"].get<std::string>();
        return result.status == RunStatus::Diverged ? static_cast<int>(kDivergence) : static_cast<int>(kSuccess);
      });
      if (o.code != kSuccess && o.status.empty()) {
        std::string msg = sink.str();
        while (!msg.empty() && msg.back() == '\n') msg.pop_back();
        o.status = msg;
      }
    });

    std::ostringstream summary;
    summary << "value,sigma,final_gap,epochs_to_threshold,status\n";
    int code = kSuccess;
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
      const Outcome& o = outcomes[idx];
      std::string status = o.status;
      for (char& c : status) {
        if (c == ',' || c == '\n') c = ';';
      }
      summary << values[idx] << ',' << number(o.sigma) << ',' << number(o.final_gap) << ','
              << (o.epochs ? number(*o.epochs) : "unreached") << ',' << status << '\n';
      log << axis << '=' << values[idx] << ": " << status << '\n';
      code = std::max(code, o.code);
    }
    write_text(fs::path(options.out_dir) / "summary.csv", summary.str());
    return code;
  });
}

int cmd_speedup(const Options& options, std::ostream& log) {
  return guarded(log, [&] {
    const Settings settings = load_settings(options);
    fs::create_directories(options.out_dir);
    const SpeedupStudy study = speedup_study(settings.run, settings.speedup_nodes, settings.speedup_threshold);
    std::ostringstream csv;
    write_trace_csv(csv, study.central);
    write_text(fs::path(options.out_dir) / "central.csv", csv.str());
    std::ostringstream table;
    table << "nodes,big_data,central_evals,node_evals,ratio\n";
    for (const auto& row : study.rows) {
      std::ostringstream trace;
      write_trace_csv(trace, row.trace);
      write_text(fs::path(options.out_dir) / ("nodes_" + std::to_string(row.nodes) + ".csv"), trace.str());
      table << row.nodes << ',' << (row.big_data ? "true" : "false") << ','
            << (row.central_evals ? std::to_string(*row.central_evals) : "unreached") << ','
            << (row.node_evals ? std::to_string(*row.node_evals) : "unreached") << ','
            << (row.ratio ? number(*row.ratio) : "unreached") << '\n';
      log << "n=" << row.nodes << " ratio " << (row.ratio ? number(*row.ratio) : "unreached") << '\n';
    }
    write_text(fs::path(options.out_dir) / "speedup.csv", table.str());
    return static_cast<int>(kSuccess);
  });
}

int cmd_verify(const VerifyOptions& options, std::ostream& out) {
  const auto results = run_verify_suites(options);
  bool ok = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(30) << r.name << r.detail << '\n';
    ok = ok && r.passed;
  }
  out << results.size() << " suites, " << (ok ? "all passed" : "failures present") << '\n';
  return ok ? kSuccess : kConfigError;
}

int cmd_plot(const std::vector<std::string>& traces, const std::string& out_dir, const std::string& style,
             std::ostream& log) {
  return guarded(log, [&] {
    if (traces.empty()) throw PlotError("plot needs at least one trace CSV");
    const XAxis axis = parse_x_axis(style);
    std::vector<PlotSeries> series;
    for (const auto& path : traces) {
      std::ifstream in(path);
      if (!in) throw IoError("cannot open trace " + path);
      PlotSeries s;
      s.trace = read_trace_csv(in);
      if (s.trace.records.empty()) throw PlotError("trace " + path + " is empty");
      s.label = fs::path(path).stem().string();
      const fs::path provenance = fs::path(path).replace_extension(".json");
      if (std::ifstream pin(provenance); pin) {
        const auto doc = nlohmann::json::parse(pin, nullptr, false);
        if (!doc.is_discarded() && doc.contains("label") && doc["label"].is_string()) {
          s.label = doc["label"].get<std::string>();
        }
      }
      series.push_back(std::move(s));
    }
    for (const auto& path : write_plots(series, out_dir, axis)) log << "wrote " << path.string() << '\n';
    return static_cast<int>(kSuccess);
  });
}

}  // namespace gtvr::cli
