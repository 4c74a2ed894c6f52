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

#include "gtvr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gtvr/errors.hpp"
#include "gtvr/rng.hpp"

namespace gtvr {

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Ring: return "ring";
    case TopologyKind::Exponential: return "exponential";
    case TopologyKind::Complete: return "complete";
    case TopologyKind::Geometric: return "geometric";
    case TopologyKind::Custom: return "custom";
  }
  return "custom";
}

TopologyKind parse_topology_kind(std::string_view name) {
  if (name == "ring") return TopologyKind::Ring;
  if (name == "exponential") return TopologyKind::Exponential;
  if (name == "complete") return TopologyKind::Complete;
  if (name == "geometric") return TopologyKind::Geometric;
  if (name == "custom") return TopologyKind::Custom;
  throw InvalidArgument("unknown topology '" + std::string(name) + "'");
}

bool strongly_connected(std::size_t n, const std::vector<Edge>& edges) {
  if (n == 0) return false;
  std::vector<std::vector<std::size_t>> fwd(n), bwd(n);
  for (const auto& [s, r] : edges) {
    fwd[s].push_back(r);
    bwd[r].push_back(s);
  }
  auto reaches_all = [n](const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reaches_all(fwd) && reaches_all(bwd);
}

Topology::Topology(std::size_t n, TopologyKind kind, std::vector<Edge> edges)
    : n_(n), kind_(kind), edges_(std::move(edges)), in_(n), out_(n) {
  if (n_ == 0) throw InvalidArgument("topology needs at least one node");
  for (const auto& [s, r] : edges_) {
    if (s >= n_ || r >= n_) {
      throw TopologyError("edge (" + std::to_string(s) + "," + std::to_string(r) +
                          ") references a node outside [0," + std::to_string(n_) + ")");
    }
  }
  for (std::size_t i = 0; i < n_; ++i) edges_.emplace_back(i, i);
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const auto& [s, r] : edges_) {
    out_[s].push_back(r);
    in_[r].push_back(s);
  }
  for (auto& v : in_) std::sort(v.begin(), v.end());
  for (auto& v : out_) std::sort(v.begin(), v.end());
  if (!strongly_connected(n_, edges_)) {
    throw TopologyError(to_string(kind_) + " topology with " + std::to_string(n_) +
                        " nodes is not strongly connected");
  }
}

bool Topology::has_edge(std::size_t sender, std::size_t receiver) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{sender, receiver});
}

bool Topology::is_symmetric() const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [this](const Edge& e) { return has_edge(e.second, e.first); });
}

Topology build_ring(std::size_t n) {
  if (n == 0) throw InvalidArgument("ring needs at least one node");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.emplace_back((i + n - 1) % n, i);
  return Topology(n, TopologyKind::Ring, std::move(edges));
}

Topology build_exponential(std::size_t n) {
  if (n == 0) throw InvalidArgument("exponential graph needs at least one node");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t hop = 1; hop < n; hop *= 2) edges.emplace_back(i, (i + hop) % n);
  }
  return Topology(n, TopologyKind::Exponential, std::move(edges));
}

Topology build_complete(std::size_t n) {
  if (n == 0) throw InvalidArgument("complete graph needs at least one node");
  std::vector<Edge> edges;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t r = 0; r < n; ++r) edges.emplace_back(s, r);
  }
  return Topology(n, TopologyKind::Complete, std::move(edges));
}

Topology build_geometric(std::size_t n, double radius, std::uint64_t seed,
                         std::size_t max_attempts) {
  if (n == 0) throw InvalidArgument("geometric graph needs at least one node");
  if (!(radius > 0.0)) throw InvalidArgument("geometric radius must be positive");
  // No two points of the unit square are farther apart than sqrt(2).
  radius = std::min(radius, std::sqrt(2.0));
  std::uint64_t attempt_seed = seed;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt, ++attempt_seed) {
    std::mt19937_64 gen(attempt_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<double, double>> points(n);
    for (auto& p : points) {
      p.first = unit(gen);
      p.second = unit(gen);
    }
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double dx = points[a].first - points[b].first;
        const double dy = points[a].second - points[b].second;
        if (std::hypot(dx, dy) <= radius) {
          edges.emplace_back(a, b);
          edges.emplace_back(b, a);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, i);
    if (!strongly_connected(n, edges)) continue;
    Topology t(n, TopologyKind::Geometric, std::move(edges));
    t.seed_used = attempt_seed;
    t.radius = radius;
    return t;
  }
  throw TopologyError("geometric graph (n=" + std::to_string(n) + ", radius=" +
                      std::to_string(radius) + ") not connected after " +
                      std::to_string(max_attempts) + " attempts; final seed tried " +
                      std::to_string(attempt_seed - 1));
}

Topology build_custom(std::size_t n, std::vector<Edge> edges) {
  return Topology(n, TopologyKind::Custom, std::move(edges));
}

void check_doubly_stochastic(const Eigen::MatrixXd& weights, double tolerance) {
  if (weights.rows() != weights.cols() || weights.rows() == 0) {
    throw WeightError("mixing matrix must be square and non-empty");
  }
  const Eigen::Index n = weights.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(weights(i, j) >= 0.0)) {
        throw WeightError("negative or non-finite weight at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double row = weights.row(i).sum();
    if (std::abs(row - 1.0) > tolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << i << " sums to " << row << ", not 1";
      throw WeightError(msg.str());
    }
    const double col = weights.col(i).sum();
    if (std::abs(col - 1.0) > tolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "column " << i << " sums to " << col << ", not 1";
      throw WeightError(msg.str());
    }
  }
}

double spectral_gap(const Eigen::MatrixXd& weights) {
  check_doubly_stochastic(weights);
  const Eigen::Index n = weights.rows();
  if (n == 1) return 0.0;

  const Eigen::MatrixXd diff =
      weights - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = static_cast<double>(splitmix64(static_cast<std::uint64_t>(i) + 17) >> 11) * 0x1.0p-53 -
           0.5;
  }
  v.normalize();

  const std::size_t cap =
      std::max<std::size_t>(1000, 10 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  double lambda = 0.0;
  for (std::size_t it = 0; it < cap; ++it) {
    const Eigen::VectorXd w = diff.transpose() * (diff * v);
    lambda = v.dot(w);
    const double norm = w.norm();
    if (norm < 1e-300) return 0.0;
    const double residual = (w - lambda * v).norm();
    if (residual <= 1e-10 * std::abs(lambda)) return std::sqrt(std::max(lambda, 0.0));
    v = w / norm;
  }
  throw Error("spectral_gap: power iteration did not converge in " + std::to_string(cap) +
              " iterations (last estimate " + std::to_string(std::sqrt(std::max(lambda, 0.0))) +
              ")");
}

MixingMatrix make_mixing_matrix(Eigen::MatrixXd weights) {
  check_doubly_stochastic(weights);
  MixingMatrix m;
  m.sigma = spectral_gap(weights);
  const Eigen::Index n = weights.rows();
  m.rows.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (weights(i, j) != 0.0) {
        m.rows[static_cast<std::size_t>(i)].push_back({static_cast<std::size_t>(j), weights(i, j)});
      }
    }
  }
  m.weights = std::move(weights);
  return m;
}

MixingMatrix uniform_weights(const Topology& topology) {
  const std::size_t n = topology.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (topology.in_neighbors(i).size() != topology.out_neighbors(i).size()) {
      throw WeightError("uniform weights: node " + std::to_string(i) + " has in-degree " +
                        std::to_string(topology.in_neighbors(i).size()) + " but out-degree " +
                        std::to_string(topology.out_neighbors(i).size()));
    }
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& in = topology.in_neighbors(i);
    const double share = 1.0 / static_cast<double>(in.size());
    for (std::size_t r : in) w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = share;
  }
  return make_mixing_matrix(std::move(w));
}

MixingMatrix metropolis_weights(const Topology& topology) {
  if (!topology.is_symmetric()) {
    throw WeightError("Metropolis weights require an undirected (symmetric) topology");
  }
  const std::size_t n = topology.size();
  std::vector<std::size_t> degree(n);
  for (std::size_t i = 0; i < n; ++i) degree[i] = topology.in_neighbors(i).size() - 1;

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t r : topology.in_neighbors(i)) {
      if (r == i) continue;
      const double wir = 1.0 / (1.0 + static_cast<double>(std::max(degree[i], degree[r])));
      w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = wir;
      off += wir;
    }
    w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0 - off;
  }
  return make_mixing_matrix(std::move(w));
}

nlohmann::json to_json(const Topology& topology, const MixingMatrix& mixing) {
  nlohmann::json j;
  j["n"] = topology.size();
  j["kind"] = to_string(topology.kind());
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [s, r] : topology.edges()) edges.push_back({s, r});
  j["edges"] = std::move(edges);
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < mixing.weights.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < mixing.weights.cols(); ++c) row.push_back(mixing.weights(i, c));
    rows.push_back(std::move(row));
  }
  j["weights"] = std::move(rows);
  j["sigma"] = mixing.sigma;
  if (topology.kind() == TopologyKind::Geometric) {
    j["seed_used"] = topology.seed_used;
    j["radius"] = topology.radius;
  }
  return j;
}

}  // namespace gtvr
