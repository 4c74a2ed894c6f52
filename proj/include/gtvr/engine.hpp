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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gtvr/algos.hpp"
#include "gtvr/dataio.hpp"
#include "gtvr/graph.hpp"
#include "gtvr/objective.hpp"
#include "gtvr/tuning.hpp"
#include "json.hpp"

namespace gtvr {

struct TopologySpec {
  TopologyKind kind = TopologyKind::Exponential;
  std::size_t nodes = 10;
  double radius = 0.5;      // geometric only
  std::uint64_t seed = 1;   // geometric only
  std::vector<Edge> edges;  // custom only
};

enum class WeightRule { Auto, Uniform, Metropolis };

std::string to_string(WeightRule rule);
WeightRule parse_weight_rule(std::string_view name);

enum class ObjectiveType { Logistic, Quadratic };

struct SyntheticSpec {
  std::size_t samples = 2000;
  std::size_t dimension = 5;
  double separation = 1.0;
  std::uint64_t seed = 7;
  std::size_t test_samples = 0;
};

struct QuadraticSpec {
  std::size_t components = 20;  // per node
  std::size_t dimension = 5;
  double spread = 1.0;  // node heterogeneity
  double noise = 1.0;   // within-node spread
  std::uint64_t seed = 7;
};

struct ObjectiveSpec {
  ObjectiveType type = ObjectiveType::Logistic;
  double lambda = 0.01;
  std::string dataset;  // empty: synthetic
  std::string test_dataset;
  std::size_t dimension = 0;  // 0: inferred from the data
  bool normalize = true;
  SyntheticSpec synthetic;
  QuadraticSpec quadratic;
};

struct PartitionSpec {
  std::vector<double> proportions;  // empty: even
  std::optional<std::uint64_t> shuffle_seed;
};

struct AlgorithmSetting {
  AlgorithmKind kind = AlgorithmKind::GtSaga;
  std::optional<double> alpha;            // nullopt: theoretical step-size
  std::optional<std::size_t> inner_loop;  // nullopt: theoretical T
};

struct RunConfig {
  TopologySpec topology;
  WeightRule weights = WeightRule::Auto;
  AlgorithmSetting algorithm;
  ObjectiveSpec objective;
  PartitionSpec partition;
  std::uint64_t iterations = 1000;
  double target_gap = 0.0;  // 0 disables early stopping
  std::uint64_t seed = 1;
  std::size_t metrics_every = 0;  // 0: every iteration up to 1000, then every 10
  bool record_iterates = false;
  std::size_t jobs = 1;
  std::string label;

  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);

struct ReferenceSolution {
  Vector x_star;
  double value = 0.0;
  double gradient_norm = 0.0;
  double zeta_sq = 0.0;  // (1/n) sum_i ||grad f_i(x*)||^2
  std::size_t iterations = 0;
};

// Closed form when the objective has one, otherwise full-batch gradient
// descent with step 1/L until ||grad F|| <= 1e-12 max(1, ||grad F(x0)||).
ReferenceSolution solve_reference(const Objective& objective, std::size_t max_iterations = 1000000);

// Everything a run needs, built (and the reference solved) before any
// stochastic iteration.
struct Problem {
  std::optional<Topology> topology;
  MixingMatrix mixing;
  std::unique_ptr<Objective> objective;
  Dataset test;
  ReferenceSolution reference;
};

Problem build_problem(const RunConfig& config);

struct MetricsRecord {
  std::uint64_t iter = 0;
  double epoch = 0.0;
  double gap = 0.0;
  double consensus_err = 0.0;
  double tracking_err = 0.0;  // NaN for methods without a tracker
  double msd = 0.0;
  double test_acc = 0.0;      // NaN without a test set
  std::uint64_t grad_evals = 0;
};

struct MetricsTrace {
  std::vector<MetricsRecord> records;
  // Node iterates at each record, only when RunConfig::record_iterates.
  std::vector<std::vector<Vector>> iterates;
};

enum class RunStatus { Completed, ReachedTarget, Diverged };

struct RunResult {
  MetricsTrace trace;
  RunStatus status = RunStatus::Completed;
  AlgorithmSpec algorithm;
  std::optional<TuningReport> tuning;
  std::string diagnostic;
  nlohmann::json provenance;
};

RunResult run(const RunConfig& config);
RunResult run(const RunConfig& config, const Problem& problem);

// Fraction of samples with sign(x^T theta) == label; a zero product counts as wrong.
double accuracy(const Vector& x, const Dataset& test);

MetricsRecord measure(const Objective& objective, const ReferenceSolution& reference,
                      const std::vector<NodeState>& states,
                      const Dataset& test, AlgorithmKind kind, std::uint64_t iteration,
                      WorkerPool* pool = nullptr);

inline constexpr const char* kTraceHeader =
    "iter,epoch,gap,consensus_err,tracking_err,msd,test_acc,grad_evals";

void write_trace_csv(std::ostream& out, const MetricsTrace& trace);
MetricsTrace read_trace_csv(std::istream& in);

// First record at or below the threshold.
std::optional<MetricsRecord> first_below(const MetricsTrace& trace, double threshold);
std::optional<double> epochs_to_threshold(const MetricsTrace& trace, double threshold);
std::optional<std::uint64_t> evals_to_threshold(const MetricsTrace& trace, double threshold);

struct SpeedupRow {
  std::size_t nodes = 1;
  bool big_data = false;
  std::optional<std::uint64_t> central_evals;
  std::optional<std::uint64_t> node_evals;
  std::optional<double> ratio;  // nullopt when either side missed the target
  MetricsTrace trace;
};

struct SpeedupStudy {
  MetricsTrace central;
  std::vector<SpeedupRow> rows;
};

// Centralized (single node, all data) versus decentralized runs of the same
// template, comparing component-gradient evaluations per node to reach the
// threshold. Each decentralized configuration must be in the big data regime.
SpeedupStudy speedup_study(const RunConfig& config, const std::vector<std::size_t>& node_counts,
                           double threshold = 1e-13);

}  // namespace gtvr
