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

#include "gtvr/verify.hpp"

#include <cstdio>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "gtvr/algos.hpp"
#include "gtvr/engine.hpp"
#include "gtvr/errors.hpp"
#include "gtvr/graph.hpp"
#include "gtvr/objective.hpp"

namespace gtvr {
namespace {

std::vector<MixingMatrix> sample_matrices() {
  std::vector<MixingMatrix> out;
  for (std::size_t n : {1, 2, 5, 10, 16}) {
    out.push_back(uniform_weights(build_ring(n)));
    out.push_back(uniform_weights(build_exponential(n)));
    out.push_back(uniform_weights(build_complete(n)));
  }
  for (std::uint64_t seed : {1, 2, 3}) out.push_back(metropolis_weights(build_geometric(20, 0.5, seed)));
  return out;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Dataset small_dataset(std::uint64_t seed) { return synth_logistic(60, 4, seed, 1.0); }

SuiteResult double_stochasticity(const VerifyOptions& options) {
  SuiteResult r{"double_stochasticity", true, ""};
  auto matrices = sample_matrices();
  if (options.corrupt_weights) matrices[4].weights(0, 0) += 1e-3;
  double worst = 0.0;
  for (const auto& m : matrices) {
    const auto& w = m.weights;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      worst = std::max(worst, std::abs(w.row(i).sum() - 1.0));
      worst = std::max(worst, std::abs(w.col(i).sum() - 1.0));
    }
    if ((w.array() < 0.0).any()) worst = std::max(worst, 1.0);
  }
  r.passed = worst <= 1e-12;
  r.detail = "max |row/col sum - 1| = " + sci(worst);
  return r;
}

SuiteResult spectral_gap_oracle() {
  SuiteResult r{"spectral_gap_vs_svd", true, ""};
  double worst = 0.0;
  for (const auto& m : sample_matrices()) {
    const Eigen::Index n = m.weights.rows();
    const Eigen::MatrixXd diff = m.weights - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    const double oracle = Eigen::JacobiSVD<Eigen::MatrixXd>(diff).singularValues()(0);
    worst = std::max(worst, std::abs(oracle - m.sigma));
  }
  r.passed = worst <= 1e-8;
  r.detail = "max |sigma - svd| = " + sci(worst);
  return r;
}

SuiteResult tracking_identity() {
  SuiteResult r{"tracking_identity", true, ""};
  const auto obj = make_quadratic(5, 8, 6, 1.0, 1.0, 11);
  const auto w = uniform_weights(build_exponential(5));
  double worst = 0.0;
  for (AlgorithmKind kind : {AlgorithmKind::GtSaga, AlgorithmKind::GtSvrg, AlgorithmKind::GtDsgd}) {
    AlgorithmSpec spec{kind, 0.05, 17};
    auto states = init_states(obj, kind, Vector::Zero(6));
    Stepper stepper(obj, w, spec, 3);
    for (std::uint64_t k = 0; k < 200; ++k) {
      stepper.step(states, k);
      Vector my = Vector::Zero(6), mr = Vector::Zero(6);
      for (const auto& s : states) {
        my += s.y;
        mr += s.r_prev;
      }
      worst = std::max(worst, ((my - mr) / 5.0).lpNorm<Eigen::Infinity>());
    }
  }
  r.passed = worst <= 1e-11;
  r.detail = "max |mean(y) - mean(r)| = " + sci(worst);
  return r;
}

template <typename Direction>
double unbiasedness_error(const Objective& obj, std::size_t node, const Vector& x, Direction&& direction) {
  const std::size_t m = obj.components(node);
  Vector avg = Vector::Zero(x.size()), g(x.size());
  for (std::size_t j = 0; j < m; ++j) {
    direction(j, g);
    avg += g;
  }
  avg /= static_cast<double>(m);
  const Vector batch = obj.batch_gradient(node, x);
  return (avg - batch).norm() / std::max(1.0, batch.norm());
}

SuiteResult saga_unbiasedness() {
  SuiteResult r{"saga_unbiasedness", true, ""};
  const Dataset data = small_dataset(5);
  const LogisticObjective obj(data, partition_even(data.size(), 3), 0.1);
  std::mt19937_64 gen(9);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Vector x0(4), x(4);
    for (int k = 0; k < 4; ++k) x0(k) = normal(gen);
    auto states = init_states(obj, AlgorithmKind::GtSaga, x0);
    auto& table = std::get<SagaTable>(states[1].estimator);
    Vector scratch(4);
    for (std::size_t j = 0; j < obj.components(1); j += 2) {
      for (int k = 0; k < 4; ++k) x(k) = normal(gen);
      saga_estimator(table, obj, 1, j, x, scratch);
    }
    for (int k = 0; k < 4; ++k) x(k) = normal(gen);
    worst = std::max(worst, unbiasedness_error(obj, 1, x, [&](std::size_t j, Vector& g) {
                       saga_direction(table, obj, 1, j, x, g);
                     }));
  }
  r.passed = worst <= 1e-13;
  r.detail = "max relative error = " + sci(worst);
  return r;
}

SuiteResult svrg_unbiasedness() {
  SuiteResult r{"svrg_unbiasedness", true, ""};
  const Dataset data = small_dataset(6);
  const LogisticObjective obj(data, partition_even(data.size(), 3), 0.1);
  std::mt19937_64 gen(10);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Vector tau(4), x(4);
    for (int k = 0; k < 4; ++k) {
      tau(k) = normal(gen);
      x(k) = normal(gen);
    }
    const SvrgSnapshot snap{tau, obj.batch_gradient(2, tau)};
    worst = std::max(worst, unbiasedness_error(obj, 2, x, [&](std::size_t j, Vector& g) {
                       svrg_direction(snap, obj, 2, j, x, g);
                     }));
  }
  r.passed = worst <= 1e-13;
  r.detail = "max relative error = " + sci(worst);
  return r;
}

SuiteResult saga_table_consistency() {
  SuiteResult r{"saga_table_consistency", true, ""};
  const Dataset data = small_dataset(7);
  const LogisticObjective obj(data, partition_even(data.size(), 4), 0.05);
  const auto w = uniform_weights(build_ring(4));
  auto states = init_states(obj, AlgorithmKind::GtSaga, Vector::Zero(4));
  Stepper stepper(obj, w, {AlgorithmKind::GtSaga, 0.1, 0}, 5);
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 500; ++k) {
    stepper.step(states, k);
    for (const auto& s : states) {
      const auto& table = std::get<SagaTable>(s.estimator);
      const Vector mean = table.gradients.rowwise().mean();
      worst = std::max(worst, (mean - table.average).norm() / std::max(1e-300, mean.norm()));
    }
  }
  r.passed = worst <= 1e-10;
  r.detail = "max relative drift = " + sci(worst);
  return r;
}

SuiteResult finite_differences() {
  SuiteResult r{"finite_difference_gradients", true, ""};
  const Dataset data = small_dataset(8);
  const LogisticObjective logistic(data, partition_even(data.size(), 2), 0.3);
  const auto quadratic = make_quadratic(2, 5, 4, 1.0, 1.0, 4);
  std::mt19937_64 gen(12);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (const Objective* obj : {static_cast<const Objective*>(&logistic), static_cast<const Objective*>(&quadratic)}) {
    for (int probe = 0; probe < 50; ++probe) {
      Vector x(4), g(4), fd(4);
      for (int k = 0; k < 4; ++k) x(k) = normal(gen);
      const std::size_t node = static_cast<std::size_t>(probe % 2);
      const std::size_t j = static_cast<std::size_t>(probe) % obj->components(node);
      obj->component_gradient(node, j, x, g);
      for (int k = 0; k < 4; ++k) {
        Vector xp = x, xm = x;
        xp(k) += 1e-6;
        xm(k) -= 1e-6;
        fd(k) = (obj->component_value(node, j, xp) - obj->component_value(node, j, xm)) / 2e-6;
      }
      worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
    }
  }
  r.passed = worst <= 1e-5;
  r.detail = "max relative error = " + sci(worst);
  return r;
}

SuiteResult determinism() {
  SuiteResult r{"determinism", true, ""};
  RunConfig config;
  config.topology.kind = TopologyKind::Ring;
  config.topology.nodes = 4;
  config.objective.type = ObjectiveType::Quadratic;
  config.algorithm = {AlgorithmKind::GtSaga, 0.05, std::nullopt};
  config.iterations = 300;
  std::ostringstream a, b;
  write_trace_csv(a, run(config).trace);
  config.jobs = 3;
  write_trace_csv(b, run(config).trace);
  r.passed = a.str() == b.str();
  r.detail = r.passed ? "traces identical for 1 and 3 workers" : "traces differ";
  return r;
}

}  // namespace

std::vector<SuiteResult> run_verify_suites(const VerifyOptions& options) {
  const std::vector<std::function<SuiteResult()>> suites = {
      [&] { return double_stochasticity(options); },
      spectral_gap_oracle,
      tracking_identity,
      saga_unbiasedness,
      svrg_unbiasedness,
      saga_table_consistency,
      finite_differences,
      determinism,
  };
  std::vector<SuiteResult> results;
  for (const auto& suite : suites) {
    try {
      results.push_back(suite());
    } catch (const std::exception& e) {
      results.push_back({"suite error", false, e.what()});
    }
  }
  return results;
}

}  // namespace gtvr
