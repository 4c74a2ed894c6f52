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

#include "gtvr/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "gtvr/errors.hpp"

#ifndef GTVR_GIT_DESCRIBE
#define GTVR_GIT_DESCRIBE "unknown"
#endif

namespace gtvr {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Topology build_topology(const TopologySpec& spec) {
  switch (spec.kind) {
    case TopologyKind::Ring: return build_ring(spec.nodes);
    case TopologyKind::Exponential: return build_exponential(spec.nodes);
    case TopologyKind::Complete: return build_complete(spec.nodes);
    case TopologyKind::Geometric: return build_geometric(spec.nodes, spec.radius, spec.seed);
    case TopologyKind::Custom: return build_custom(spec.nodes, spec.edges);
  }
  throw InvalidArgument("unknown topology kind");
}

MixingMatrix build_weights(const Topology& topology, WeightRule rule) {
  switch (rule) {
    case WeightRule::Uniform: return uniform_weights(topology);
    case WeightRule::Metropolis: return metropolis_weights(topology);
    case WeightRule::Auto: break;
  }
  if (topology.kind() == TopologyKind::Geometric) return metropolis_weights(topology);
  if (topology.kind() == TopologyKind::Custom && topology.is_symmetric()) {
    return metropolis_weights(topology);
  }
  return uniform_weights(topology);
}

void append_number(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  char buffer[64];
  const auto res = std::to_chars(buffer, buffer + sizeof(buffer), v);
  out.append(buffer, res.ptr);
}

double parse_csv_double(std::string_view field) {
  if (field == "nan") return kNaN;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("trace csv: bad number '" + std::string(field) + "'");
  }
  return v;
}

bool should_record(std::uint64_t k, const RunConfig& config, const AlgorithmSpec& spec) {
  if (spec.kind == AlgorithmKind::GtSvrg && k % spec.inner_loop == 0) return true;
  if (config.metrics_every > 0) return k % config.metrics_every == 0;
  return k <= 1000 || k % 10 == 0;
}

std::string status_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::ReachedTarget: return "reached_target";
    case RunStatus::Diverged: return "diverged";
  }
  return "completed";
}

}  // namespace

std::string to_string(WeightRule rule) {
  switch (rule) {
    case WeightRule::Auto: return "auto";
    case WeightRule::Uniform: return "uniform";
    case WeightRule::Metropolis: return "metropolis";
  }
  return "auto";
}

WeightRule parse_weight_rule(std::string_view name) {
  if (name == "auto") return WeightRule::Auto;
  if (name == "uniform") return WeightRule::Uniform;
  if (name == "metropolis") return WeightRule::Metropolis;
  throw InvalidArgument("unknown weight rule '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  if (topology.nodes < 1) throw ConfigError("network.nodes must be >= 1");
  if (topology.kind == TopologyKind::Geometric && !(topology.radius > 0.0)) {
    throw ConfigError("network.radius must be positive");
  }
  if (iterations < 1) throw ConfigError("run.iterations must be >= 1");
  if (!(target_gap >= 0.0)) throw ConfigError("run.target_gap must be >= 0");
  if (jobs < 1) throw ConfigError("run.jobs must be >= 1");
  if (algorithm.alpha && !(*algorithm.alpha > 0.0 && std::isfinite(*algorithm.alpha))) {
    throw ConfigError("algorithm.alpha must be > 0");
  }
  if (algorithm.inner_loop && *algorithm.inner_loop < 1) {
    throw ConfigError("algorithm.inner_loop must be >= 1");
  }
  const bool vr = algorithm.kind == AlgorithmKind::GtSaga || algorithm.kind == AlgorithmKind::GtSvrg;
  if (!algorithm.alpha && !vr) {
    throw ConfigError("algorithm.alpha = \"theory\" is only defined for gt-saga and gt-svrg");
  }
  if (objective.type == ObjectiveType::Logistic) {
    if (!(objective.lambda > 0.0)) throw ConfigError("objective.lambda must be > 0");
    if (objective.dataset.empty() && objective.synthetic.samples < topology.nodes) {
      throw ConfigError("synthetic.samples must be at least network.nodes");
    }
    if (objective.dataset.empty() && objective.synthetic.dimension < 1) {
      throw ConfigError("synthetic.dimension must be >= 1");
    }
  } else {
    if (objective.quadratic.components < 1) throw ConfigError("quadratic.components must be >= 1");
    if (objective.quadratic.dimension < 1) throw ConfigError("quadratic.dimension must be >= 1");
  }
  if (!partition.proportions.empty() && partition.proportions.size() != topology.nodes) {
    throw ConfigError("partition.proportions needs one entry per node");
  }
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["network"] = {{"topology", to_string(c.topology.kind)},
                  {"nodes", c.topology.nodes},
                  {"radius", c.topology.radius},
                  {"graph_seed", c.topology.seed},
                  {"weights", to_string(c.weights)}};
  nlohmann::json alg = {{"kind", to_string(c.algorithm.kind)}};
  alg["alpha"] = c.algorithm.alpha ? nlohmann::json(*c.algorithm.alpha) : nlohmann::json("theory");
  if (c.algorithm.kind == AlgorithmKind::GtSvrg) {
    alg["inner_loop"] =
        c.algorithm.inner_loop ? nlohmann::json(*c.algorithm.inner_loop) : nlohmann::json("theory");
  }
  j["algorithm"] = alg;
  const auto& o = c.objective;
  j["objective"] = {{"type", o.type == ObjectiveType::Logistic ? "logistic" : "quadratic"},
                    {"lambda", o.lambda},
                    {"dataset", o.dataset},
                    {"test_dataset", o.test_dataset},
                    {"dimension", o.dimension},
                    {"normalize", o.normalize}};
  if (o.type == ObjectiveType::Logistic && o.dataset.empty()) {
    j["synthetic"] = {{"samples", o.synthetic.samples},
                      {"dimension", o.synthetic.dimension},
                      {"separation", o.synthetic.separation},
                      {"seed", o.synthetic.seed},
                      {"test_samples", o.synthetic.test_samples}};
  }
  if (o.type == ObjectiveType::Quadratic) {
    j["quadratic"] = {{"components", o.quadratic.components},
                      {"dimension", o.quadratic.dimension},
                      {"spread", o.quadratic.spread},
                      {"noise", o.quadratic.noise},
                      {"seed", o.quadratic.seed}};
  }
  j["partition"] = {{"mode", c.partition.proportions.empty() ? "even" : "proportions"},
                    {"proportions", c.partition.proportions}};
  if (c.partition.shuffle_seed) j["partition"]["shuffle_seed"] = *c.partition.shuffle_seed;
  j["run"] = {{"iterations", c.iterations}, {"target_gap", c.target_gap},
              {"seed", c.seed},             {"metrics_every", c.metrics_every},
              {"jobs", c.jobs},             {"label", c.label}};
  return j;
}

ReferenceSolution solve_reference(const Objective& objective, std::size_t max_iterations) {
  const Constants constants = objective.constants();
  if (!(constants.mu > 0.0)) throw OracleError("reference solver needs mu > 0");
  ReferenceSolution ref;
  const auto p = static_cast<Eigen::Index>(objective.dimension());

  if (auto closed = objective.closed_form_minimizer()) {
    ref.x_star = std::move(*closed);
  } else {
    Vector x = Vector::Zero(p);
    Vector g = objective.gradient(x);
    const double tolerance = 1e-12 * std::max(1.0, g.norm());
    const double step = 1.0 / constants.L;
    std::size_t it = 0;
    while (g.norm() > tolerance) {
      if (it == max_iterations) {
        std::ostringstream msg;
        msg << "reference solver stopped at gradient norm " << g.norm() << " after " << it
            << " iterations (tolerance " << tolerance << ")";
        throw OracleError(msg.str());
      }
      x -= step * g;
      g = objective.gradient(x);
      ++it;
    }
    ref.x_star = std::move(x);
    ref.iterations = it;
  }
  ref.gradient_norm = objective.gradient(ref.x_star).norm();
  ref.value = objective.value(ref.x_star);
  long double zeta = 0.0L;
  for (std::size_t i = 0; i < objective.nodes(); ++i) {
    zeta += objective.batch_gradient(i, ref.x_star).squaredNorm();
  }
  ref.zeta_sq = static_cast<double>(zeta / static_cast<long double>(objective.nodes()));
  return ref;
}

Problem build_problem(const RunConfig& config) {
  config.validate();
  Problem problem;
  const std::size_t n = config.topology.nodes;
  if (n == 1) {
    problem.topology.emplace(build_ring(1));
    problem.mixing = make_mixing_matrix(Eigen::MatrixXd::Ones(1, 1));
  } else {
    problem.topology.emplace(build_topology(config.topology));
    problem.mixing = build_weights(*problem.topology, config.weights);
  }

  const ObjectiveSpec& spec = config.objective;
  if (spec.type == ObjectiveType::Quadratic) {
    const auto& q = spec.quadratic;
    problem.objective = std::make_unique<QuadraticObjective>(
        make_quadratic(n, q.components, q.dimension, q.spread, q.noise, q.seed));
  } else {
    Dataset train;
    const std::optional<std::size_t> dim =
        spec.dimension > 0 ? std::optional<std::size_t>(spec.dimension) : std::nullopt;
    if (spec.dataset.empty()) {
      const auto& s = spec.synthetic;
      Dataset all = synth_logistic(s.samples + s.test_samples, s.dimension, s.seed, s.separation);
      problem.test.assign(all.begin() + static_cast<std::ptrdiff_t>(s.samples), all.end());
      all.resize(s.samples);
      train = std::move(all);
    } else {
      train = read_libsvm(spec.dataset, dim);
      if (spec.normalize) train = normalize_unit(std::move(train));
      if (!spec.test_dataset.empty()) {
        const auto p = static_cast<std::size_t>(train.front().features.size());
        problem.test = read_libsvm(spec.test_dataset, p);
        if (spec.normalize) problem.test = normalize_unit(std::move(problem.test));
      }
    }
    if (train.empty()) throw ConfigError("dataset has no samples");
    if (config.partition.shuffle_seed) {
      train = shuffle_samples(std::move(train), *config.partition.shuffle_seed);
    }
    const Partition part = config.partition.proportions.empty()
                               ? partition_even(train.size(), n)
                               : partition_proportional(train.size(), config.partition.proportions);
    problem.objective = std::make_unique<LogisticObjective>(train, part, spec.lambda);
  }
  problem.reference = solve_reference(*problem.objective);
  return problem;
}

double accuracy(const Vector& x, const Dataset& test) {
  if (test.empty()) throw MetricError("accuracy is undefined on an empty test set");
  std::size_t correct = 0;
  for (const auto& s : test) {
    if (s.features.size() != x.size()) throw DimensionError("accuracy: dimension mismatch");
    const double margin = s.features.dot(x) * static_cast<double>(s.label);
    if (margin > 0.0) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

MetricsRecord measure(const Objective& objective, const ReferenceSolution& reference,
                      const std::vector<NodeState>& states,
                      const Dataset& test, AlgorithmKind kind, std::uint64_t iteration,
                      WorkerPool* pool) {
  const std::size_t n = states.size();
  MetricsRecord rec;
  rec.iter = iteration;

  std::vector<double> gaps(n), accs(n, kNaN);
  auto per_node = [&](std::size_t i) {
    gaps[i] = objective.excess(states[i].x, reference.x_star);
    if (!test.empty()) accs[i] = accuracy(states[i].x, test);
  };
  if (pool != nullptr) {
    pool->parallel_for(n, per_node);
  } else {
    for (std::size_t i = 0; i < n; ++i) per_node(i);
  }

  const auto p = states.front().x.size();
  Vector mean_x = Vector::Zero(p);
  for (const auto& s : states) mean_x += s.x;
  mean_x /= static_cast<double>(n);

  double gap = 0.0, consensus = 0.0, msd = 0.0, acc = 0.0;
  double epoch = 0.0;
  std::uint64_t evals = 0;
  for (std::size_t i = 0; i < n; ++i) {
    gap += gaps[i];
    consensus += (states[i].x - mean_x).squaredNorm();
    msd += (states[i].x - reference.x_star).squaredNorm();
    acc += accs[i];
    evals = std::max(evals, states[i].grad_evals);
    epoch = std::max(epoch, static_cast<double>(states[i].grad_evals) /
                                static_cast<double>(objective.components(i)));
  }
  rec.gap = gap / static_cast<double>(n);
  rec.consensus_err = consensus;
  rec.msd = msd / static_cast<double>(n);
  rec.test_acc = test.empty() ? kNaN : acc / static_cast<double>(n);
  rec.grad_evals = evals;
  rec.epoch = epoch;

  if (uses_tracking(kind)) {
    Vector mean_y = Vector::Zero(p);
    for (const auto& s : states) mean_y += s.y;
    mean_y /= static_cast<double>(n);
    double tracking = 0.0;
    for (const auto& s : states) tracking += (s.y - mean_y).squaredNorm();
    rec.tracking_err = tracking;
  } else {
    rec.tracking_err = kNaN;
  }
  return rec;
}

RunResult run(const RunConfig& config) {
  const Problem problem = build_problem(config);
  return run(config, problem);
}

RunResult run(const RunConfig& config, const Problem& problem) {
  config.validate();
  const Objective& objective = *problem.objective;
  RunResult result;

  std::optional<TuningReport> tuning;
  const bool vr = config.algorithm.kind == AlgorithmKind::GtSaga ||
                  config.algorithm.kind == AlgorithmKind::GtSvrg;
  if (vr) {
    const Constants c = objective.constants();
    const double sigma = problem.mixing.sigma;
    if (config.algorithm.kind == AlgorithmKind::GtSaga) {
      tuning = saga_tuning(c.mu, c.L, sigma, objective.max_components(), objective.min_components());
    } else {
      tuning = svrg_tuning(c.mu, c.L, sigma);
      tuning->big_data =
          big_data_check(objective.max_components(), objective.min_components(), c.Q, sigma);
    }
  }

  AlgorithmSpec spec;
  spec.kind = config.algorithm.kind;
  spec.alpha = config.algorithm.alpha ? *config.algorithm.alpha : tuning->alpha;
  if (spec.kind == AlgorithmKind::GtSvrg) {
    spec.inner_loop = config.algorithm.inner_loop ? *config.algorithm.inner_loop : tuning->inner_loop;
  }
  spec.validate();
  result.algorithm = spec;
  result.tuning = tuning;

  std::unique_ptr<WorkerPool> pool;
  if (config.jobs > 1) pool = std::make_unique<WorkerPool>(config.jobs);

  auto states =
      init_states(objective, spec.kind, Vector::Zero(static_cast<Eigen::Index>(objective.dimension())));
  Stepper stepper(objective, problem.mixing, spec, config.seed, pool.get());

  auto& trace = result.trace;
  auto record = [&](std::uint64_t k) {
    trace.records.push_back(
        measure(objective, problem.reference, states, problem.test, spec.kind, k, pool.get()));
    if (config.record_iterates) {
      std::vector<Vector> xs;
      for (const auto& s : states) xs.push_back(s.x);
      trace.iterates.push_back(std::move(xs));
    }
  };

  record(0);
  std::uint64_t k = 0;
  if (config.target_gap > 0.0 && trace.records.back().gap <= config.target_gap) {
    result.status = RunStatus::ReachedTarget;
  }
  while (result.status == RunStatus::Completed && k < config.iterations) {
    if (!stepper.step(states, k)) {
      result.status = RunStatus::Diverged;
      result.diagnostic = "non-finite iterate at iteration " + std::to_string(k + 1) +
                          "; last finite iteration " + std::to_string(k);
      if (trace.records.back().iter != k) record(k);
      break;
    }
    ++k;
    if (should_record(k, config, spec) || k == config.iterations) {
      record(k);
      if (config.target_gap > 0.0 && trace.records.back().gap <= config.target_gap) {
        result.status = RunStatus::ReachedTarget;
      }
    }
  }

  nlohmann::json prov;
  prov["label"] = config.label.empty() ? to_string(spec.kind) : config.label;
  prov["config"] = to_json(config);
  if (problem.topology) prov["network"] = to_json(*problem.topology, problem.mixing);
  prov["sigma"] = problem.mixing.sigma;
  prov["algorithm"] = {{"kind", to_string(spec.kind)}, {"alpha", spec.alpha}};
  if (spec.kind == AlgorithmKind::GtSvrg) prov["algorithm"]["inner_loop"] = spec.inner_loop;
  if (tuning) prov["tuning"] = to_json(*tuning);
  try {
    const Constants c = objective.constants();
    prov["constants"] = {{"mu", c.mu}, {"L", c.L}, {"Q", c.Q}};
  } catch (const AssumptionError&) {
  }
  prov["reference"] = {{"value", problem.reference.value},
                       {"gradient_norm", problem.reference.gradient_norm},
                       {"zeta_sq", problem.reference.zeta_sq},
                       {"iterations", problem.reference.iterations}};
  prov["seeds"] = {{"run", config.seed}};
  if (problem.topology && problem.topology->kind() == TopologyKind::Geometric) {
    prov["seeds"]["graph_seed_used"] = problem.topology->seed_used;
  }
  prov["git_describe"] = GTVR_GIT_DESCRIBE;
  prov["status"] = status_string(result.status);
  if (!result.diagnostic.empty()) prov["diagnostic"] = result.diagnostic;
  result.provenance = std::move(prov);
  return result;
}

void write_trace_csv(std::ostream& out, const MetricsTrace& trace) {
  std::string text = kTraceHeader;
  text += '\n';
  for (const auto& r : trace.records) {
    text += std::to_string(r.iter);
    text += ',';
    append_number(text, r.epoch);
    text += ',';
    append_number(text, r.gap);
    text += ',';
    append_number(text, r.consensus_err);
    text += ',';
    append_number(text, r.tracking_err);
    text += ',';
    append_number(text, r.msd);
    text += ',';
    append_number(text, r.test_acc);
    text += ',';
    text += std::to_string(r.grad_evals);
    text += '\n';
  }
  out << text;
}

MetricsTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trace csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw ParseError("trace csv has an unexpected header: " + line);
  MetricsTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view view(line);
    for (std::size_t pos = 0;;) {
      const auto comma = view.find(',', pos);
      fields.push_back(view.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != 8) {
      throw ParseError("trace csv line " + std::to_string(line_no) + ": expected 8 fields");
    }
    MetricsRecord r;
    r.iter = static_cast<std::uint64_t>(parse_csv_double(fields[0]));
    r.epoch = parse_csv_double(fields[1]);
    r.gap = parse_csv_double(fields[2]);
    r.consensus_err = parse_csv_double(fields[3]);
    r.tracking_err = parse_csv_double(fields[4]);
    r.msd = parse_csv_double(fields[5]);
    r.test_acc = parse_csv_double(fields[6]);
    r.grad_evals = static_cast<std::uint64_t>(parse_csv_double(fields[7]));
    trace.records.push_back(r);
  }
  return trace;
}

std::optional<MetricsRecord> first_below(const MetricsTrace& trace, double threshold) {
  for (const auto& r : trace.records) {
    if (r.gap <= threshold) return r;
  }
  return std::nullopt;
}

std::optional<double> epochs_to_threshold(const MetricsTrace& trace, double threshold) {
  if (auto r = first_below(trace, threshold)) return r->epoch;
  return std::nullopt;
}

std::optional<std::uint64_t> evals_to_threshold(const MetricsTrace& trace, double threshold) {
  if (auto r = first_below(trace, threshold)) return r->grad_evals;
  return std::nullopt;
}

SpeedupStudy speedup_study(const RunConfig& config, const std::vector<std::size_t>& node_counts,
                           double threshold) {
  if (!(threshold > 0.0)) throw InvalidArgument("speedup threshold must be positive");
  SpeedupStudy study;

  RunConfig central = config;
  central.topology.nodes = 1;
  central.partition.proportions.clear();
  central.target_gap = threshold;
  const RunResult central_run = run(central);
  study.central = central_run.trace;
  const auto central_evals = evals_to_threshold(central_run.trace, threshold);

  for (std::size_t n : node_counts) {
    RunConfig dec = config;
    dec.topology.nodes = n;
    dec.target_gap = threshold;
    const Problem problem = build_problem(dec);
    const Objective& obj = *problem.objective;
    const Constants c = obj.constants();
    SpeedupRow row;
    row.nodes = n;
    row.big_data = n == 1 || big_data_check(obj.max_components(), obj.min_components(), c.Q,
                                            problem.mixing.sigma);
    if (!row.big_data) {
      std::ostringstream msg;
      msg << "speedup study: n=" << n << " is outside the big data regime (m="
          << obj.min_components() << ", Q=" << c.Q << ", sigma=" << problem.mixing.sigma << ")";
      throw InvalidArgument(msg.str());
    }
    const RunResult dec_run = run(dec, problem);
    row.trace = dec_run.trace;
    row.central_evals = central_evals;
    row.node_evals = evals_to_threshold(dec_run.trace, threshold);
    if (row.central_evals && row.node_evals && *row.node_evals > 0) {
      row.ratio = static_cast<double>(*row.central_evals) / static_cast<double>(*row.node_evals);
    }
    study.rows.push_back(std::move(row));
  }
  return study;
}

}  // namespace gtvr
