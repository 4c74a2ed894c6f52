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

#include "gtvr/algos.hpp"

#include <cmath>

#include "gtvr/errors.hpp"
#include "gtvr/rng.hpp"

namespace gtvr {
namespace {

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

Vector vector_from_json(const nlohmann::json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) v(static_cast<Eigen::Index>(k)) = a[k].get<double>();
  return v;
}

template <typename Get>
void accumulate_row(const MixingMatrix& weights, std::size_t row, Get&& get, Vector& out) {
  const auto& entries = weights.rows[row];
  out.setZero();
  for (const auto& e : entries) out.noalias() += e.weight * get(e.column);
}

}  // namespace

std::string to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::GtSaga: return "gt-saga";
    case AlgorithmKind::GtSvrg: return "gt-svrg";
    case AlgorithmKind::GtDsgd: return "gt-dsgd";
    case AlgorithmKind::Dsgd: return "dsgd";
  }
  return "dsgd";
}

AlgorithmKind parse_algorithm_kind(std::string_view name) {
  if (name == "gt-saga") return AlgorithmKind::GtSaga;
  if (name == "gt-svrg") return AlgorithmKind::GtSvrg;
  if (name == "gt-dsgd") return AlgorithmKind::GtDsgd;
  if (name == "dsgd") return AlgorithmKind::Dsgd;
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

bool uses_tracking(AlgorithmKind kind) { return kind != AlgorithmKind::Dsgd; }

void AlgorithmSpec::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("step-size alpha must be positive and finite");
  }
  if (kind == AlgorithmKind::GtSvrg && inner_loop < 1) {
    throw InvalidArgument("GT-SVRG needs an inner loop length T >= 1");
  }
}

std::vector<NodeState> init_states(const Objective& objective, AlgorithmKind kind,
                                   const std::vector<Vector>& x0) {
  const std::size_t n = objective.nodes();
  const auto p = static_cast<Eigen::Index>(objective.dimension());
  if (x0.size() != n) {
    throw DimensionError("init_states: expected " + std::to_string(n) + " initial points, got " +
                         std::to_string(x0.size()));
  }
  std::vector<NodeState> states(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (x0[i].size() != p) throw DimensionError("init_states: initial point has wrong dimension");
    NodeState& s = states[i];
    s.x = x0[i];
    if (!uses_tracking(kind)) continue;

    const std::size_t m = objective.components(i);
    if (kind == AlgorithmKind::GtSaga) {
      SagaTable table;
      table.gradients.resize(p, static_cast<Eigen::Index>(m));
      Vector g(p);
      for (std::size_t j = 0; j < m; ++j) {
        objective.component_gradient(i, j, s.x, g);
        table.gradients.col(static_cast<Eigen::Index>(j)) = g;
      }
      table.average = table.gradients.rowwise().sum() / static_cast<double>(m);
      s.y = table.average;
      s.estimator = std::move(table);
    } else {
      s.y = objective.batch_gradient(i, s.x);
      if (kind == AlgorithmKind::GtSvrg) s.estimator = SvrgSnapshot{s.x, s.y};
    }
    s.r_prev = s.y;
    s.grad_evals = m;
  }
  return states;
}

std::vector<NodeState> init_states(const Objective& objective, AlgorithmKind kind, const Vector& x0) {
  return init_states(objective, kind, std::vector<Vector>(objective.nodes(), x0));
}

std::size_t sample_index(std::uint64_t seed, std::size_t node, std::uint64_t iteration,
                         std::size_t components) {
  CounterStream stream(seed, node, iteration);
  return static_cast<std::size_t>(stream.below(components));
}

void saga_direction(const SagaTable& table, const Objective& objective, std::size_t node,
                    std::size_t j, const Vector& x, Vector& out) {
  thread_local Vector g;
  g.resize(x.size());
  objective.component_gradient(node, j, x, g);
  out = g - table.gradients.col(static_cast<Eigen::Index>(j)) + table.average;
}

void svrg_direction(const SvrgSnapshot& snapshot, const Objective& objective, std::size_t node,
                    std::size_t j, const Vector& x, Vector& out) {
  thread_local Vector g, h;
  g.resize(x.size());
  h.resize(x.size());
  objective.component_gradient(node, j, x, g);
  objective.component_gradient(node, j, snapshot.point, h);
  out = g - h + snapshot.batch_gradient;
}

std::size_t saga_estimator(SagaTable& table, const Objective& objective, std::size_t node,
                           std::size_t j, const Vector& x_new, Vector& out) {
  const auto col = static_cast<Eigen::Index>(j);
  const auto m = static_cast<double>(table.gradients.cols());
  if (out.size() != x_new.size()) out.resize(x_new.size());
  objective.component_gradient(node, j, x_new, out);
  // out holds grad f_ij(x_new); turn it into g while refreshing slot j.
  auto slot = table.gradients.col(col);
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const double fresh = out(k);
    const double delta = fresh - slot(k);
    slot(k) = fresh;
    out(k) = delta + table.average(k);
    table.average(k) += delta / m;
  }
  if (++table.updates_since_resync >= 10 * static_cast<std::size_t>(table.gradients.cols())) {
    table.average = table.gradients.rowwise().sum() / m;
    table.updates_since_resync = 0;
  }
  return 1;
}

std::size_t svrg_estimator(SvrgSnapshot& snapshot, const Objective& objective, std::size_t node,
                           std::size_t j, const Vector& x_new, std::uint64_t k,
                           std::size_t inner_loop, Vector& out) {
  std::size_t evals = 2;
  if ((k + 1) % inner_loop == 0) {
    snapshot.point = x_new;
    snapshot.batch_gradient = objective.batch_gradient(node, x_new);
    evals += objective.components(node);
  }
  svrg_direction(snapshot, objective, node, j, x_new, out);
  return evals;
}

void mix_row(const MixingMatrix& weights, std::size_t row, const std::vector<Vector>& in,
             Vector& out) {
  if (out.size() != in.front().size()) out.resize(in.front().size());
  accumulate_row(weights, row, [&](std::size_t r) -> const Vector& { return in[r]; }, out);
}

void mix(const MixingMatrix& weights, const std::vector<Vector>& in, std::vector<Vector>& out) {
  if (in.size() != weights.size()) {
    throw DimensionError("mix: " + std::to_string(in.size()) + " rows for a " +
                         std::to_string(weights.size()) + "-node mixing matrix");
  }
  for (const auto& v : in) {
    if (v.size() != in.front().size()) throw DimensionError("mix: rows differ in dimension");
  }
  out.resize(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) mix_row(weights, i, in, out[i]);
}

Stepper::Stepper(const Objective& objective, const MixingMatrix& weights, AlgorithmSpec spec,
                 std::uint64_t seed, WorkerPool* pool)
    : objective_(objective), weights_(weights), spec_(spec), seed_(seed), pool_(pool) {
  spec_.validate();
  if (weights.size() != objective.nodes()) {
    throw DimensionError("mixing matrix has " + std::to_string(weights.size()) +
                         " nodes but the objective has " + std::to_string(objective.nodes()));
  }
  const std::size_t n = objective.nodes();
  const auto p = static_cast<Eigen::Index>(objective.dimension());
  next_x_.assign(n, Vector::Zero(p));
  next_y_.assign(n, Vector::Zero(p));
  estimate_.assign(n, Vector::Zero(p));
  scratch_.assign(n, Vector::Zero(p));
  evals_.assign(n, 0);
  finite_.assign(n, 1);
}

void Stepper::update_node(std::vector<NodeState>& states, std::size_t i, std::uint64_t k) {
  NodeState& s = states[i];
  Vector& nx = next_x_[i];
  accumulate_row(weights_, i, [&](std::size_t r) -> const Vector& { return states[r].x; }, nx);
  const std::size_t m = objective_.components(i);
  const std::size_t j = sample_index(seed_, i, k, m);

  if (spec_.kind == AlgorithmKind::Dsgd) {
    objective_.component_gradient(i, j, s.x, scratch_[i]);
    nx.noalias() -= spec_.alpha * scratch_[i];
    evals_[i] = 1;
    finite_[i] = nx.allFinite() ? 1 : 0;
    return;
  }

  nx.noalias() -= spec_.alpha * s.y;
  Vector& ny = next_y_[i];
  accumulate_row(weights_, i, [&](std::size_t r) -> const Vector& { return states[r].y; }, ny);
  Vector& r_new = estimate_[i];
  switch (spec_.kind) {
    case AlgorithmKind::GtSaga:
      evals_[i] = saga_estimator(std::get<SagaTable>(s.estimator), objective_, i, j, nx, r_new);
      break;
    case AlgorithmKind::GtSvrg:
      evals_[i] = svrg_estimator(std::get<SvrgSnapshot>(s.estimator), objective_, i, j, nx, k,
                                 spec_.inner_loop, r_new);
      break;
    default:
      objective_.component_gradient(i, j, nx, r_new);
      evals_[i] = 1;
      break;
  }
  ny += r_new;
  ny -= s.r_prev;
  finite_[i] = (nx.allFinite() && ny.allFinite()) ? 1 : 0;
}

bool Stepper::step(std::vector<NodeState>& states, std::uint64_t k) {
  const std::size_t n = states.size();
  if (pool_ != nullptr) {
    pool_->parallel_for(n, [&](std::size_t i) { update_node(states, i, k); });
  } else {
    for (std::size_t i = 0; i < n; ++i) update_node(states, i, k);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!finite_[i]) return false;
  }
  const bool tracking = uses_tracking(spec_.kind);
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(states[i].x, next_x_[i]);
    if (tracking) {
      std::swap(states[i].y, next_y_[i]);
      std::swap(states[i].r_prev, estimate_[i]);
    }
    states[i].grad_evals += evals_[i];
  }
  return true;
}

nlohmann::json checkpoint_to_json(const std::vector<NodeState>& states, std::uint64_t iteration) {
  nlohmann::json doc;
  doc["iteration"] = iteration;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& s : states) {
    nlohmann::json node;
    node["x"] = vector_json(s.x);
    node["y"] = vector_json(s.y);
    node["r_prev"] = vector_json(s.r_prev);
    node["grad_evals"] = s.grad_evals;
    if (const auto* table = std::get_if<SagaTable>(&s.estimator)) {
      nlohmann::json cols = nlohmann::json::array();
      for (Eigen::Index c = 0; c < table->gradients.cols(); ++c) {
        cols.push_back(vector_json(table->gradients.col(c)));
      }
      node["saga"] = {{"gradients", std::move(cols)},
                      {"average", vector_json(table->average)},
                      {"updates_since_resync", table->updates_since_resync}};
    } else if (const auto* snap = std::get_if<SvrgSnapshot>(&s.estimator)) {
      node["svrg"] = {{"point", vector_json(snap->point)},
                      {"batch_gradient", vector_json(snap->batch_gradient)}};
    }
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);
  return doc;
}

std::vector<NodeState> checkpoint_from_json(const nlohmann::json& doc, std::uint64_t& iteration) {
  iteration = doc.at("iteration").get<std::uint64_t>();
  std::vector<NodeState> states;
  for (const auto& node : doc.at("nodes")) {
    NodeState s;
    s.x = vector_from_json(node.at("x"));
    s.y = vector_from_json(node.at("y"));
    s.r_prev = vector_from_json(node.at("r_prev"));
    s.grad_evals = node.at("grad_evals").get<std::uint64_t>();
    if (node.contains("saga")) {
      const auto& saga = node["saga"];
      const auto& cols = saga.at("gradients");
      SagaTable table;
      table.gradients.resize(s.x.size(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) {
        table.gradients.col(static_cast<Eigen::Index>(c)) = vector_from_json(cols[c]);
      }
      table.average = vector_from_json(saga.at("average"));
      table.updates_since_resync = saga.at("updates_since_resync").get<std::size_t>();
      s.estimator = std::move(table);
    } else if (node.contains("svrg")) {
      s.estimator = SvrgSnapshot{vector_from_json(node["svrg"].at("point")),
                                 vector_from_json(node["svrg"].at("batch_gradient"))};
    }
    states.push_back(std::move(s));
  }
  return states;
}

}  // namespace gtvr
