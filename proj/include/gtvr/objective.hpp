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
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gtvr/dataio.hpp"

namespace gtvr {

using Vector = Eigen::VectorXd;

struct Constants {
  double mu = 0.0;  // strong convexity of F
  double L = 0.0;   // smoothness of every component
  double Q = 0.0;   // L / mu
};

struct ValueGradient {
  double value = 0.0;
  Vector gradient;
};

// log(1 + exp(-label * x^T theta)) + (lambda/2)||x||^2 and its gradient.
ValueGradient logistic_component(const Sample& sample, double lambda, const Vector& x);

// 0.5 ||x - center||^2 and its gradient.
ValueGradient quadratic_component(const Vector& center, const Vector& x);

// mu = lambda, L = lambda + 1/4, valid for unit-norm features.
Constants constants_logistic(const Dataset& samples, double lambda);

// Finite sum F(x) = (1/n) sum_i f_i(x), f_i(x) = (1/m_i) sum_j f_ij(x).
// Algorithms only see the component oracles below.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t nodes() const = 0;
  virtual std::size_t components(std::size_t node) const = 0;
  virtual std::size_t dimension() const = 0;

  virtual double component_value(std::size_t node, std::size_t j, const Vector& x) const = 0;
  // `out` must already have the problem dimension.
  virtual void component_gradient(std::size_t node, std::size_t j, const Vector& x,
                                  Vector& out) const = 0;
  // f_ij(x) - f_ij(ref); implementations avoid cancellation when x ~ ref.
  virtual double component_excess(std::size_t node, std::size_t j, const Vector& x,
                                  const Vector& ref) const;

  virtual Constants constants() const = 0;
  virtual std::optional<Vector> closed_form_minimizer() const { return std::nullopt; }

  Vector batch_gradient(std::size_t node, const Vector& x) const;
  double local_value(std::size_t node, const Vector& x) const;
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  // (1/m_i) sum_j [f_ij(x) - f_ij(ref)]
  double local_excess(std::size_t node, const Vector& x, const Vector& ref) const;
  // F(x) - F(ref)
  double excess(const Vector& x, const Vector& ref) const;

  std::size_t max_components() const;
  std::size_t min_components() const;
  std::size_t total_components() const;
};

class LogisticObjective final : public Objective {
 public:
  LogisticObjective(const Dataset& samples, const Partition& partition, double lambda);

  std::size_t nodes() const override { return partition_.nodes(); }
  std::size_t components(std::size_t node) const override { return partition_.count(node); }
  std::size_t dimension() const override { return static_cast<std::size_t>(features_.rows()); }

  double component_value(std::size_t node, std::size_t j, const Vector& x) const override;
  void component_gradient(std::size_t node, std::size_t j, const Vector& x,
                          Vector& out) const override;
  double component_excess(std::size_t node, std::size_t j, const Vector& x,
                          const Vector& ref) const override;
  Constants constants() const override;

  double lambda() const { return lambda_; }

 private:
  std::size_t column(std::size_t node, std::size_t j) const { return partition_.range(node).first + j; }

  Eigen::MatrixXd features_;  // p x N, one sample per column
  Eigen::VectorXd labels_;
  Partition partition_;
  double lambda_;
  double max_sq_norm_ = 0.0;
};

class QuadraticObjective final : public Objective {
 public:
  // centers[i][j] is c_ij.
  explicit QuadraticObjective(std::vector<std::vector<Vector>> centers);

  std::size_t nodes() const override { return centers_.size(); }
  std::size_t components(std::size_t node) const override { return centers_[node].size(); }
  std::size_t dimension() const override { return dimension_; }

  double component_value(std::size_t node, std::size_t j, const Vector& x) const override;
  void component_gradient(std::size_t node, std::size_t j, const Vector& x,
                          Vector& out) const override;
  double component_excess(std::size_t node, std::size_t j, const Vector& x,
                          const Vector& ref) const override;
  Constants constants() const override { return {1.0, 1.0, 1.0}; }
  std::optional<Vector> closed_form_minimizer() const override;

  const Vector& center(std::size_t node, std::size_t j) const { return centers_[node][j]; }

 private:
  std::vector<std::vector<Vector>> centers_;
  std::size_t dimension_;
};

// c_ij = b_i + noise * e_ij with node offsets b_i ~ spread * N(0, I).
QuadraticObjective make_quadratic(std::size_t nodes, std::size_t components_per_node,
                                  std::size_t dimension, double spread, double noise,
                                  std::uint64_t seed);

}  // namespace gtvr
