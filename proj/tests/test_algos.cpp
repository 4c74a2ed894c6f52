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

#include <cmath>
#include <random>

#include "doctest.h"
#include "gtvr/algos.hpp"
#include "gtvr/errors.hpp"

using namespace gtvr;

namespace {

Vector random_vector(std::mt19937_64& gen, Eigen::Index p) {
  std::normal_distribution<double> normal;
  Vector v(p);
  for (Eigen::Index i = 0; i < p; ++i) v(i) = normal(gen);
  return v;
}

Vector mean_of(const std::vector<NodeState>& s, Vector NodeState::*field) {
  Vector m = Vector::Zero((s[0].*field).size());
  for (const auto& n : s) m += n.*field;
  return m / static_cast<double>(s.size());
}

}  // namespace

TEST_CASE("initial states") {
  const Dataset d = synth_logistic(90, 4, 1, 1.0);
  const LogisticObjective obj(d, partition_even(90, 3), 0.1);
  std::mt19937_64 gen(1);
  const Vector x0 = random_vector(gen, 4);
  const auto saga = init_states(obj, AlgorithmKind::GtSaga, x0);
  Vector mean_grad = Vector::Zero(4);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& table = std::get<SagaTable>(saga[i].estimator);
    CHECK((table.average - obj.batch_gradient(i, x0)).norm() <= 1e-15);
    CHECK(saga[i].y == saga[i].r_prev);
    CHECK(saga[i].grad_evals == obj.components(i));
    mean_grad += obj.batch_gradient(i, x0);
  }
  CHECK((mean_of(saga, &NodeState::y) - mean_grad / 3).norm() <= 1e-14);

  const auto svrg = init_states(obj, AlgorithmKind::GtSvrg, x0);
  CHECK(std::get<SvrgSnapshot>(svrg[0].estimator).point == x0);
  CHECK(init_states(obj, AlgorithmKind::Dsgd, x0)[0].y.size() == 0);

  const QuadraticObjective q({{Vector::Constant(2, 3.0)}, {Vector::Constant(2, -1.0)}});
  const auto at_center = init_states(q, AlgorithmKind::GtSaga, std::vector<Vector>{Vector::Constant(2, 3.0), Vector::Constant(2, -1.0)});
  CHECK(at_center[0].y.norm() == 0.0);
  CHECK(at_center[1].y.norm() == 0.0);
}

TEST_CASE("sample index") {
  for (std::uint64_t k = 0; k < 100; ++k) CHECK(sample_index(3, 1, k, 1) == 0);
  CHECK(sample_index(5, 2, 77, 13) == sample_index(5, 2, 77, 13));

  // Chi-square over 1e5 draws, 10 bins: 9 d.o.f., mean 9, sd sqrt(18).
  const std::size_t m = 10, draws = 100000;
  std::vector<double> counts(m, 0.0);
  for (std::uint64_t k = 0; k < draws; ++k) counts[sample_index(17, 4, k, m)] += 1.0;
  double chi2 = 0.0;
  const double expected = static_cast<double>(draws) / m;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 <= 9.0 + 3.0 * std::sqrt(18.0));
}

TEST_CASE("saga estimator cancellations and unbiasedness") {
  const Dataset d = synth_logistic(40, 3, 2, 1.0);
  const LogisticObjective obj(d, partition_even(40, 2), 0.1);
  std::mt19937_64 gen(2);

  const Dataset one{d[0]};
  const LogisticObjective single(one, partition_even(1, 1), 0.1);
  auto s1 = init_states(single, AlgorithmKind::GtSaga, random_vector(gen, 3));
  const Vector x = random_vector(gen, 3);
  Vector out(3), g(3);
  saga_estimator(std::get<SagaTable>(s1[0].estimator), single, 0, 0, x, out);
  single.component_gradient(0, 0, x, g);
  CHECK((out - g).norm() <= 1e-15);

  auto s = init_states(obj, AlgorithmKind::GtSaga, x);
  auto& table = std::get<SagaTable>(s[1].estimator);
  saga_direction(table, obj, 1, 5, x, out);
  CHECK((out - obj.batch_gradient(1, x)).norm() <= 1e-15);

  for (std::size_t j = 0; j < obj.components(1); ++j) saga_estimator(table, obj, 1, j, random_vector(gen, 3), out);
  const Vector x2 = random_vector(gen, 3);
  Vector avg = Vector::Zero(3);
  for (std::size_t j = 0; j < obj.components(1); ++j) {
    saga_direction(table, obj, 1, j, x2, out);
    avg += out;
  }
  avg /= static_cast<double>(obj.components(1));
  const Vector batch = obj.batch_gradient(1, x2);
  CHECK((avg - batch).norm() / batch.norm() <= 1e-13);
  CHECK(((table.gradients.rowwise().mean() - table.average).norm()) <= 1e-10 * table.average.norm());
}

TEST_CASE("svrg estimator") {
  const Dataset d = synth_logistic(40, 3, 3, 1.0);
  const LogisticObjective obj(d, partition_even(40, 2), 0.1);
  std::mt19937_64 gen(3);
  const Vector tau = random_vector(gen, 3);
  SvrgSnapshot snap{tau, obj.batch_gradient(0, tau)};
  Vector out(3);
  svrg_direction(snap, obj, 0, 3, tau, out);
  CHECK((out - snap.batch_gradient).norm() <= 1e-15);

  const Vector x = random_vector(gen, 3);
  Vector avg = Vector::Zero(3);
  for (std::size_t j = 0; j < obj.components(0); ++j) {
    svrg_direction(snap, obj, 0, j, x, out);
    avg += out;
  }
  avg /= static_cast<double>(obj.components(0));
  CHECK((avg - obj.batch_gradient(0, x)).norm() / obj.batch_gradient(0, x).norm() <= 1e-13);

  // Refresh exactly when (k + 1) % T == 0, at the new point.
  CHECK(svrg_estimator(snap, obj, 0, 1, x, 3, 5, out) == 2);
  CHECK(snap.point == tau);
  CHECK(svrg_estimator(snap, obj, 0, 1, x, 4, 5, out) == 2 + obj.components(0));
  CHECK(snap.point == x);
  CHECK((out - obj.batch_gradient(0, x)).norm() <= 1e-15);
}

TEST_CASE("mixing") {
  std::mt19937_64 gen(4);
  std::vector<Vector> in;
  for (int i = 0; i < 6; ++i) in.push_back(random_vector(gen, 3));
  std::vector<Vector> out;
  mix(make_mixing_matrix(Eigen::MatrixXd::Identity(6, 6)), in, out);
  for (int i = 0; i < 6; ++i) CHECK(out[i] == in[i]);

  Vector mean = Vector::Zero(3);
  for (const auto& v : in) mean += v;
  mean /= 6;
  mix(make_mixing_matrix(Eigen::MatrixXd::Constant(6, 6, 1.0 / 6)), in, out);
  for (const auto& v : out) CHECK((v - mean).norm() <= 1e-15);

  mix(metropolis_weights(build_geometric(6, 0.8, 2)), in, out);
  Vector after = Vector::Zero(3);
  for (const auto& v : out) after += v;
  CHECK((after / 6 - mean).norm() <= 1e-13);
}

TEST_CASE("single-node steps reduce to centralized methods") {
  // DSGD with n = 1 is plain SGD on the sampled component.
  const auto q = make_quadratic(1, 7, 3, 1.0, 1.0, 5);
  const auto w = uniform_weights(build_ring(1));
  auto states = init_states(q, AlgorithmKind::Dsgd, Vector::Zero(3));
  Stepper dsgd(q, w, {AlgorithmKind::Dsgd, 0.1, 0}, 9);
  Vector x = Vector::Zero(3);
  for (std::uint64_t k = 0; k < 50; ++k) {
    const std::size_t j = sample_index(9, 0, k, 7);
    x = x - 0.1 * (x - q.center(0, j));
    REQUIRE(dsgd.step(states, k));
    CHECK((states[0].x - x).norm() <= 1e-14);
  }

  // GT-SAGA with n = 1 and m = 1 is gradient descent, contracting by 1 - alpha*mu.
  const QuadraticObjective one({{Vector::Constant(3, 2.0)}});
  auto s = init_states(one, AlgorithmKind::GtSaga, Vector::Zero(3));
  Stepper saga(one, w, {AlgorithmKind::GtSaga, 0.3, 0}, 1);
  const Vector star = Vector::Constant(3, 2.0);
  double dist = star.norm();
  for (std::uint64_t k = 0; k < 30; ++k) {
    REQUIRE(saga.step(s, k));
    dist *= 0.7;
    CHECK((s[0].x - star).norm() == doctest::Approx(dist).epsilon(1e-10));
  }
}

TEST_CASE("tracking identity and evaluation counts") {
  const Dataset d = synth_logistic(120, 4, 6, 1.0);
  const LogisticObjective obj(d, partition_proportional(120, {0.4, 0.3, 0.2, 0.1}), 0.05);
  const auto w = uniform_weights(build_ring(4));
  const std::size_t T = 7;
  for (AlgorithmKind kind : {AlgorithmKind::GtSaga, AlgorithmKind::GtSvrg, AlgorithmKind::GtDsgd}) {
    auto states = init_states(obj, kind, Vector::Zero(4));
    Stepper stepper(obj, w, {kind, 0.2, T}, 2);
    for (std::uint64_t k = 0; k < 100; ++k) {
      REQUIRE(stepper.step(states, k));
      const Vector gap = mean_of(states, &NodeState::y) - mean_of(states, &NodeState::r_prev);
      CHECK(gap.lpNorm<Eigen::Infinity>() <= 1e-11);
      for (std::size_t i = 0; i < 4; ++i) {
        const std::uint64_t steps = k + 1, m = obj.components(i);
        std::uint64_t expected = m + steps;
        if (kind == AlgorithmKind::GtSvrg) expected = m + 2 * steps + m * (steps / T);
        CHECK(states[i].grad_evals == expected);
      }
    }
  }
}

TEST_CASE("variance vanishes near convergence") {
  const auto q = make_quadratic(4, 10, 3, 1.0, 1.0, 8);
  const auto w = uniform_weights(build_exponential(4));
  for (AlgorithmKind kind : {AlgorithmKind::GtSaga, AlgorithmKind::GtSvrg}) {
    auto states = init_states(q, kind, Vector::Zero(3));
    Stepper stepper(q, w, {kind, 0.1, 40}, 3);
    for (std::uint64_t k = 0; k < 3000; ++k) REQUIRE(stepper.step(states, k));
    double var = 0.0;
    for (std::size_t i = 0; i < 4; ++i) var += (states[i].r_prev - q.batch_gradient(i, states[i].x)).squaredNorm();
    CHECK(var <= 1e-16);
  }
}

TEST_CASE("divergence leaves the last finite state") {
  const auto q = make_quadratic(2, 3, 2, 1.0, 1.0, 4);
  const auto w = uniform_weights(build_complete(2));
  auto states = init_states(q, AlgorithmKind::GtSaga, Vector::Zero(2));
  Stepper stepper(q, w, {AlgorithmKind::GtSaga, 1e150, 0}, 1);
  std::uint64_t k = 0;
  while (k < 100 && stepper.step(states, k)) ++k;
  CHECK(k < 100);
  for (const auto& s : states) CHECK(s.x.allFinite());
}

TEST_CASE("checkpoint resume matches an uninterrupted run") {
  const Dataset d = synth_logistic(60, 3, 7, 1.0);
  const LogisticObjective obj(d, partition_even(60, 3), 0.1);
  const auto w = uniform_weights(build_exponential(3));
  for (AlgorithmKind kind : {AlgorithmKind::GtSaga, AlgorithmKind::GtSvrg, AlgorithmKind::Dsgd}) {
    const AlgorithmSpec spec{kind, 0.1, 9};
    auto full = init_states(obj, kind, Vector::Zero(3));
    Stepper a(obj, w, spec, 5);
    for (std::uint64_t k = 0; k < 40; ++k) a.step(full, k);

    auto part = init_states(obj, kind, Vector::Zero(3));
    Stepper b(obj, w, spec, 5);
    for (std::uint64_t k = 0; k < 17; ++k) b.step(part, k);
    std::uint64_t resume = 0;
    auto restored = checkpoint_from_json(nlohmann::json::parse(checkpoint_to_json(part, 17).dump()), resume);
    CHECK(resume == 17);
    Stepper c(obj, w, spec, 5);
    for (std::uint64_t k = resume; k < 40; ++k) c.step(restored, k);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(restored[i].x == full[i].x);
      CHECK(restored[i].grad_evals == full[i].grad_evals);
    }
  }
}

TEST_CASE("parallel steps are bitwise identical") {
  const Dataset d = synth_logistic(200, 4, 8, 1.0);
  const LogisticObjective obj(d, partition_even(200, 8), 0.05);
  const auto w = uniform_weights(build_exponential(8));
  auto serial = init_states(obj, AlgorithmKind::GtSvrg, Vector::Zero(4));
  auto threaded = serial;
  WorkerPool pool(4);
  Stepper a(obj, w, {AlgorithmKind::GtSvrg, 0.2, 11}, 3);
  Stepper b(obj, w, {AlgorithmKind::GtSvrg, 0.2, 11}, 3, &pool);
  for (std::uint64_t k = 0; k < 200; ++k) {
    a.step(serial, k);
    b.step(threaded, k);
  }
  for (std::size_t i = 0; i < 8; ++i) CHECK(serial[i].x == threaded[i].x);
}

TEST_CASE("algorithm spec validation") {
  CHECK_THROWS_AS((AlgorithmSpec{AlgorithmKind::GtSaga, 0.0, 0}).validate(), InvalidArgument);
  CHECK_THROWS_AS((AlgorithmSpec{AlgorithmKind::GtSvrg, 0.1, 0}).validate(), InvalidArgument);
  CHECK_NOTHROW((AlgorithmSpec{AlgorithmKind::GtSvrg, 0.1, 1}).validate());
  CHECK(parse_algorithm_kind("gt-svrg") == AlgorithmKind::GtSvrg);
  CHECK_THROWS_AS(parse_algorithm_kind("adam"), InvalidArgument);
}
