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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gtvr/graph.hpp"
#include "gtvr/objective.hpp"
#include "gtvr/parallel.hpp"
#include "json.hpp"

namespace gtvr {

enum class AlgorithmKind { GtSaga, GtSvrg, GtDsgd, Dsgd };

std::string to_string(AlgorithmKind kind);
AlgorithmKind parse_algorithm_kind(std::string_view name);
bool uses_tracking(AlgorithmKind kind);

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::GtSaga;
  double alpha = 0.0;
  std::size_t inner_loop = 0;  // GT-SVRG only

  void validate() const;
};

// Table of the most recent component gradients and their running mean.
struct SagaTable {
  Eigen::MatrixXd gradients;  // p x m_i
  Vector average;
  std::size_t updates_since_resync = 0;
};

struct SvrgSnapshot {
  Vector point;
  Vector batch_gradient;
};

struct NodeState {
  Vector x;
  Vector y;       // gradient tracker; empty for DSGD
  Vector r_prev;  // previous estimator; empty for DSGD
  std::variant<std::monostate, SagaTable, SvrgSnapshot> estimator;
  std::uint64_t grad_evals = 0;
};

std::vector<NodeState> init_states(const Objective& objective, AlgorithmKind kind,
                                   const std::vector<Vector>& x0);
std::vector<NodeState> init_states(const Objective& objective, AlgorithmKind kind, const Vector& x0);

// Uniform component index for (node, iteration) under `seed`.
std::size_t sample_index(std::uint64_t seed, std::size_t node, std::uint64_t iteration,
                         std::size_t components);

// Estimator value at x for component j, leaving the state untouched.
void saga_direction(const SagaTable& table, const Objective& objective, std::size_t node,
                    std::size_t j, const Vector& x, Vector& out);
void svrg_direction(const SvrgSnapshot& snapshot, const Objective& objective, std::size_t node,
                    std::size_t j, const Vector& x, Vector& out);

// Computes g from the current table, then stores grad f_ij(x_new) in slot j.
// Returns the number of component-gradient evaluations.
std::size_t saga_estimator(SagaTable& table, const Objective& objective, std::size_t node,
                           std::size_t j, const Vector& x_new, Vector& out);

// Refreshes the snapshot to x_new when (k+1) mod T == 0, then computes v.
std::size_t svrg_estimator(SvrgSnapshot& snapshot, const Objective& objective, std::size_t node,
                           std::size_t j, const Vector& x_new, std::uint64_t k,
                           std::size_t inner_loop, Vector& out);

// out_i = sum_r W_ir in_r.
void mix(const MixingMatrix& weights, const std::vector<Vector>& in, std::vector<Vector>& out);
void mix_row(const MixingMatrix& weights, std::size_t row, const std::vector<Vector>& in,
             Vector& out);

// One synchronous round of the selected method. Node updates read only the
// previous round's x and y, so they may run in any order or in parallel.
class Stepper {
 public:
  Stepper(const Objective& objective, const MixingMatrix& weights, AlgorithmSpec spec,
          std::uint64_t seed, WorkerPool* pool = nullptr);

  // Advances states from iteration k to k+1. Returns false, leaving x and y at
  // iteration k, when the new iterate has a non-finite coordinate.
  bool step(std::vector<NodeState>& states, std::uint64_t k);

  // Component-gradient evaluations per node in the last round.
  const std::vector<std::size_t>& last_evals() const { return evals_; }

 private:
  void update_node(std::vector<NodeState>& states, std::size_t i, std::uint64_t k);

  const Objective& objective_;
  const MixingMatrix& weights_;
  AlgorithmSpec spec_;
  std::uint64_t seed_;
  WorkerPool* pool_;
  std::vector<Vector> next_x_, next_y_, estimate_, scratch_;
  std::vector<std::size_t> evals_;
  std::vector<char> finite_;
};

nlohmann::json checkpoint_to_json(const std::vector<NodeState>& states, std::uint64_t iteration);
std::vector<NodeState> checkpoint_from_json(const nlohmann::json& doc, std::uint64_t& iteration);

}  // namespace gtvr
