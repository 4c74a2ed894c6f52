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

#include "gtvr/objective.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gtvr/errors.hpp"

namespace gtvr {
namespace {

// log(1 + exp(-t)) without overflow.
double softplus_neg(double t) {
  return t > 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

// 1 / (1 + exp(t)).
double sigmoid_neg(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

void require_dims(const Vector& a, Eigen::Index p, const char* what) {
  if (a.size() != p) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(p) +
                         ", got " + std::to_string(a.size()));
  }
}

}  // namespace

ValueGradient logistic_component(const Sample& sample, double lambda, const Vector& x) {
  require_dims(x, sample.features.size(), "logistic_component");
  const double label = static_cast<double>(sample.label);
  const double t = label * sample.features.dot(x);
  ValueGradient out;
  out.value = softplus_neg(t) + 0.5 * lambda * x.squaredNorm();
  out.gradient = (-label * sigmoid_neg(t)) * sample.features + lambda * x;
  return out;
}

ValueGradient quadratic_component(const Vector& center, const Vector& x) {
  require_dims(x, center.size(), "quadratic_component");
  ValueGradient out;
  out.gradient = x - center;
  out.value = 0.5 * out.gradient.squaredNorm();
  return out;
}

Constants constants_logistic(const Dataset& samples, double lambda) {
  if (!(lambda > 0.0)) {
    throw AssumptionError("logistic objective needs lambda > 0 for strong convexity");
  }
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if (std::abs(samples[s].features.norm() - 1.0) > 1e-9) {
      throw NormalizationError("constants_logistic: sample " + std::to_string(s) +
                               " is not unit norm");
    }
  }
  const double L = lambda + 0.25;
  return {lambda, L, L / lambda};
}

double Objective::component_excess(std::size_t node, std::size_t j, const Vector& x,
                                   const Vector& ref) const {
  return component_value(node, j, x) - component_value(node, j, ref);
}

Vector Objective::batch_gradient(std::size_t node, const Vector& x) const {
  const auto p = static_cast<Eigen::Index>(dimension());
  Vector sum = Vector::Zero(p);
  Vector g(p);
  const std::size_t m = components(node);
  for (std::size_t j = 0; j < m; ++j) {
    component_gradient(node, j, x, g);
    sum += g;
  }
  return sum / static_cast<double>(m);
}

double Objective::local_value(std::size_t node, const Vector& x) const {
  long double sum = 0.0L;
  const std::size_t m = components(node);
  for (std::size_t j = 0; j < m; ++j) sum += component_value(node, j, x);
  return static_cast<double>(sum / static_cast<long double>(m));
}

double Objective::value(const Vector& x) const {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < nodes(); ++i) sum += local_value(i, x);
  return static_cast<double>(sum / static_cast<long double>(nodes()));
}

Vector Objective::gradient(const Vector& x) const {
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(dimension()));
  for (std::size_t i = 0; i < nodes(); ++i) sum += batch_gradient(i, x);
  return sum / static_cast<double>(nodes());
}

double Objective::local_excess(std::size_t node, const Vector& x, const Vector& ref) const {
  long double sum = 0.0L;
  const std::size_t m = components(node);
  for (std::size_t j = 0; j < m; ++j) sum += component_excess(node, j, x, ref);
  return static_cast<double>(sum / static_cast<long double>(m));
}

double Objective::excess(const Vector& x, const Vector& ref) const {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < nodes(); ++i) sum += local_excess(i, x, ref);
  return static_cast<double>(sum / static_cast<long double>(nodes()));
}

std::size_t Objective::max_components() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes(); ++i) best = std::max(best, components(i));
  return best;
}

std::size_t Objective::min_components() const {
  std::size_t best = components(0);
  for (std::size_t i = 1; i < nodes(); ++i) best = std::min(best, components(i));
  return best;
}

std::size_t Objective::total_components() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < nodes(); ++i) total += components(i);
  return total;
}

LogisticObjective::LogisticObjective(const Dataset& samples, const Partition& partition,
                                     double lambda)
    : partition_(partition), lambda_(lambda) {
  if (samples.empty()) throw InvalidArgument("logistic objective needs samples");
  if (partition.total() != samples.size()) {
    throw PartitionError("partition covers " + std::to_string(partition.total()) +
                         " samples but the dataset has " + std::to_string(samples.size()));
  }
  if (lambda < 0.0) throw InvalidArgument("lambda must be non-negative");
  const Eigen::Index p = samples.front().features.size();
  features_.resize(p, static_cast<Eigen::Index>(samples.size()));
  labels_.resize(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    require_dims(samples[s].features, p, "logistic objective sample");
    features_.col(static_cast<Eigen::Index>(s)) = samples[s].features;
    labels_(static_cast<Eigen::Index>(s)) = static_cast<double>(samples[s].label);
    max_sq_norm_ = std::max(max_sq_norm_, samples[s].features.squaredNorm());
  }
}

double LogisticObjective::component_value(std::size_t node, std::size_t j, const Vector& x) const {
  const auto c = static_cast<Eigen::Index>(column(node, j));
  const double t = labels_(c) * features_.col(c).dot(x);
  return softplus_neg(t) + 0.5 * lambda_ * x.squaredNorm();
}

void LogisticObjective::component_gradient(std::size_t node, std::size_t j, const Vector& x,
                                           Vector& out) const {
  const auto c = static_cast<Eigen::Index>(column(node, j));
  const double label = labels_(c);
  const double t = label * features_.col(c).dot(x);
  out.noalias() = (-label * sigmoid_neg(t)) * features_.col(c) + lambda_ * x;
}

double LogisticObjective::component_excess(std::size_t node, std::size_t j, const Vector& x,
                                           const Vector& ref) const {
  const auto c = static_cast<Eigen::Index>(column(node, j));
  const double label = labels_(c);
  const double a = label * features_.col(c).dot(x);
  const double b = label * features_.col(c).dot(ref);
  // softplus(-a) - softplus(-b) = log1p(sigmoid(-b) * expm1(b - a))
  const double loss = std::abs(b - a) < 30.0 ? std::log1p(sigmoid_neg(b) * std::expm1(b - a))
                                             : softplus_neg(a) - softplus_neg(b);
  return loss + 0.5 * lambda_ * (x - ref).dot(x + ref);
}

Constants LogisticObjective::constants() const {
  if (!(lambda_ > 0.0)) {
    throw AssumptionError("logistic objective needs lambda > 0 for strong convexity");
  }
  const double L = lambda_ + 0.25 * max_sq_norm_;
  return {lambda_, L, L / lambda_};
}

QuadraticObjective::QuadraticObjective(std::vector<std::vector<Vector>> centers)
    : centers_(std::move(centers)) {
  if (centers_.empty() || centers_.front().empty()) {
    throw InvalidArgument("quadratic objective needs at least one component per node");
  }
  dimension_ = static_cast<std::size_t>(centers_.front().front().size());
  for (const auto& node : centers_) {
    if (node.empty()) throw InvalidArgument("quadratic objective: node without components");
    for (const auto& c : node) require_dims(c, static_cast<Eigen::Index>(dimension_), "quadratic center");
  }
}

double QuadraticObjective::component_value(std::size_t node, std::size_t j, const Vector& x) const {
  return 0.5 * (x - centers_[node][j]).squaredNorm();
}

void QuadraticObjective::component_gradient(std::size_t node, std::size_t j, const Vector& x,
                                            Vector& out) const {
  out.noalias() = x - centers_[node][j];
}

double QuadraticObjective::component_excess(std::size_t node, std::size_t j, const Vector& x,
                                            const Vector& ref) const {
  return 0.5 * (x - ref).dot(x + ref - 2.0 * centers_[node][j]);
}

std::optional<Vector> QuadraticObjective::closed_form_minimizer() const {
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(dimension_));
  for (const auto& node : centers_) {
    Vector local = Vector::Zero(static_cast<Eigen::Index>(dimension_));
    for (const auto& c : node) local += c;
    sum += local / static_cast<double>(node.size());
  }
  return Vector(sum / static_cast<double>(centers_.size()));
}

QuadraticObjective make_quadratic(std::size_t nodes, std::size_t components_per_node,
                                  std::size_t dimension, double spread, double noise,
                                  std::uint64_t seed) {
  if (nodes == 0 || components_per_node == 0 || dimension == 0) {
    throw InvalidArgument("quadratic problem needs nodes, components and dimension >= 1");
  }
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto p = static_cast<Eigen::Index>(dimension);
  std::vector<std::vector<Vector>> centers(nodes);
  for (auto& node : centers) {
    Vector offset(p);
    for (Eigen::Index k = 0; k < p; ++k) offset(k) = spread * normal(gen);
    node.reserve(components_per_node);
    for (std::size_t j = 0; j < components_per_node; ++j) {
      Vector c(p);
      for (Eigen::Index k = 0; k < p; ++k) c(k) = offset(k) + noise * normal(gen);
      node.push_back(std::move(c));
    }
  }
  return QuadraticObjective(std::move(centers));
}

}  // namespace gtvr
