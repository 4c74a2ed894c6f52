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

#include "doctest.h"
#include "gtvr/errors.hpp"
#include "gtvr/tuning.hpp"

using namespace gtvr;

TEST_CASE("saga tuning closed form") {
  const auto t = saga_tuning(1.0, 1.0, 0.0, 1, 1);
  CHECK(t.alpha == doctest::Approx(1.0 / 320));
  CHECK(t.rate == doctest::Approx(1.0 - 1.0 / 1280));

  double prev_alpha = 1.0, prev_rate = 0.0;
  for (double sigma : {0.0, 0.3, 0.6, 0.9, 0.99, 0.999}) {
    const auto r = saga_tuning(0.1, 1.0, sigma, 100, 100);
    CHECK(r.alpha <= prev_alpha);
    CHECK(r.rate >= prev_rate);
    CHECK(r.rate < 1.0);
    prev_alpha = r.alpha;
    prev_rate = r.rate;
  }
  CHECK_THROWS_AS(saga_tuning(0.1, 1.0, 1.0, 10, 10), AssumptionError);
  CHECK_THROWS_AS(saga_tuning(0.0, 1.0, 0.5, 10, 10), AssumptionError);
  CHECK_THROWS_AS(saga_tuning(0.1, 1.0, 0.5, 5, 10), AssumptionError);
}

TEST_CASE("saga tuning is monotone") {
  const double base = saga_tuning(0.1, 1.0, 0.5, 100, 80).alpha;
  CHECK(saga_tuning(0.1, 1.0, 0.5, 200, 80).alpha <= base);
  CHECK(saga_tuning(0.05, 1.0, 0.5, 100, 80).alpha <= base);
  CHECK(saga_tuning(0.1, 1.0, 0.7, 100, 80).alpha <= base);
  CHECK(saga_tuning(0.1, 1.0, 0.5, 100, 90).alpha >= base);
}

TEST_CASE("saga complexity branches") {
  // M = m: iterations ~ max{20M, 1280 Q^2/(1-sigma^2)^2} ln(1/eps).
  for (double sigma : {0.0, 0.6, 0.95}) {
    for (std::size_t M : {10, 1000, 100000}) {
      const double mu = 0.1, L = 2.0, Q = L / mu;
      const auto t = saga_tuning(mu, L, sigma, M, M);
      const double branch = std::max(20.0 * M, 1280.0 * Q * Q / std::pow(1 - sigma * sigma, 2));
      CHECK(1.0 / (1.0 - t.rate) == doctest::Approx(branch).epsilon(1e-8));
      const double eps = 1e-8;
      CHECK(static_cast<double>(t.iterations_to(eps)) ==
            doctest::Approx(std::ceil(std::log(eps) / std::log(t.rate))));
    }
  }
}

TEST_CASE("svrg tuning closed form") {
  const auto t = svrg_tuning(1.0, 1.0, 0.0);
  CHECK(t.alpha == doctest::Approx(1.0 / 187));
  CHECK(t.inner_loop == 7927);
  CHECK(t.rate == 0.7);
  CHECK(svrg_tuning(0.5, 2.0, 0.5).alpha == (1 - 0.25) * (1 - 0.25) / (187 * 4.0 * 2.0));
  std::size_t prev = 0;
  for (double sigma : {0.0, 0.5, 0.9, 0.99}) {
    const auto r = svrg_tuning(0.1, 1.0, sigma);
    CHECK(r.inner_loop > prev);
    prev = r.inner_loop;
  }
  CHECK(svrg_tuning(1.0, 1.0, 0.0).iterations_to(0.7 * 0.7) == 2 * 7927);
}

TEST_CASE("step sizes respect the common lemma precondition") {
  for (double mu : {0.01, 0.1, 1.0}) {
    for (double L : {1.0, 5.0}) {
      if (L < mu) continue;
      for (double sigma : {0.0, 0.5, 0.95}) {
        for (std::size_t M : {1, 50, 5000}) {
          const double cap = 1.0 / (4 * std::sqrt(2.0) * L);
          CHECK(saga_tuning(mu, L, sigma, M, std::max<std::size_t>(1, M / 2)).alpha <= cap);
          CHECK(svrg_tuning(mu, L, sigma).alpha <= cap);
        }
      }
    }
  }
}

TEST_CASE("big data regime") {
  CHECK(big_data_check(50000, 50000, 26, 0.6));
  CHECK_FALSE(big_data_check(10, 10, 26, 0.6));
  CHECK(big_data_check(10, 10, 1, 0.0));
  CHECK_FALSE(big_data_check(130, 100, 1, 0.0));
}

TEST_CASE("tuning json") {
  const auto j = to_json(svrg_tuning(0.1, 1.0, 0.5));
  CHECK(j["algorithm"] == "gt-svrg");
  CHECK(j["inner_loop"].get<std::size_t>() > 0);
  CHECK(j.contains("note"));
}
