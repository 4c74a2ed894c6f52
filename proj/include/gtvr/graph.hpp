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
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace gtvr {

enum class TopologyKind { Ring, Exponential, Complete, Geometric, Custom };

std::string to_string(TopologyKind kind);
TopologyKind parse_topology_kind(std::string_view name);

using Edge = std::pair<std::size_t, std::size_t>;  // sender -> receiver

// Directed communication graph. Every node carries a self-loop and the graph
// is strongly connected; both are checked on construction.
class Topology {
 public:
  Topology(std::size_t n, TopologyKind kind, std::vector<Edge> edges);

  std::size_t size() const { return n_; }
  TopologyKind kind() const { return kind_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Neighborhoods include the node itself.
  const std::vector<std::size_t>& in_neighbors(std::size_t i) const { return in_[i]; }
  const std::vector<std::size_t>& out_neighbors(std::size_t i) const { return out_[i]; }

  bool has_edge(std::size_t sender, std::size_t receiver) const;
  bool is_symmetric() const;

  // Geometric graphs only: the seed that produced a connected sample.
  std::uint64_t seed_used = 0;
  double radius = 0.0;

 private:
  std::size_t n_;
  TopologyKind kind_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::vector<std::size_t>> out_;
};

bool strongly_connected(std::size_t n, const std::vector<Edge>& edges);

Topology build_ring(std::size_t n);
Topology build_exponential(std::size_t n);
Topology build_complete(std::size_t n);
Topology build_geometric(std::size_t n, double radius, std::uint64_t seed,
                         std::size_t max_attempts = 100);
Topology build_custom(std::size_t n, std::vector<Edge> edges);

// Doubly stochastic weights with a sparse row view used by the mixing step.
struct MixingMatrix {
  struct Entry {
    std::size_t column;
    double weight;
  };

  Eigen::MatrixXd weights;
  double sigma = 0.0;
  std::vector<std::vector<Entry>> rows;

  std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
};

// Validates double stochasticity and computes sigma.
MixingMatrix make_mixing_matrix(Eigen::MatrixXd weights);

MixingMatrix uniform_weights(const Topology& topology);
MixingMatrix metropolis_weights(const Topology& topology);

// Throws WeightError naming the first offending row/column.
void check_doubly_stochastic(const Eigen::MatrixXd& weights, double tolerance = 1e-12);

// ||W - (1/n) 1 1^T||_2 by power iteration on (W-J)^T (W-J).
double spectral_gap(const Eigen::MatrixXd& weights);

nlohmann::json to_json(const Topology& topology, const MixingMatrix& mixing);

}  // namespace gtvr
