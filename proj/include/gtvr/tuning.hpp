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

#include "gtvr/algos.hpp"
#include "json.hpp"

namespace gtvr {

// Step-size and rate predictions from the explicit constants of the linear
// convergence analysis. Iteration predictions take the unreported leading
// constant as 1, so they are order-correct only.
struct TuningReport {
  AlgorithmKind kind = AlgorithmKind::GtSaga;
  double alpha = 0.0;
  std::size_t inner_loop = 0;  // GT-SVRG only
  // GT-SAGA: per-iteration contraction bound. GT-SVRG: per outer loop.
  double rate = 1.0;
  bool big_data = false;

  // ceil(ln(eps) / ln(rate)) iterations (GT-SAGA) or outer loops times T
  // (GT-SVRG).
  std::uint64_t iterations_to(double eps) const;
  // Component-gradient evaluations per node; M is the largest local count.
  std::uint64_t gradient_evals_to(double eps, std::size_t M) const;
};

// alpha = min{1/(5 mu M), m (1-sigma^2)^2 / (320 M L Q)}
// rate  = 1 - min{1/(20 M), m (1-sigma^2)^2 / (1280 M Q^2)}
TuningReport saga_tuning(double mu, double L, double sigma, std::size_t M, std::size_t m);

// alpha = (1-sigma^2)^2 / (187 Q L), T = ceil(1496 Q^2 / (1-sigma^2)^2 ln(200 Q)),
// 0.7 contraction per outer loop.
TuningReport svrg_tuning(double mu, double L, double sigma);

// m >= 10 Q^2 / (1-sigma)^2 and M/m <= 1.25.
bool big_data_check(std::size_t M, std::size_t m, double Q, double sigma);

nlohmann::json to_json(const TuningReport& report);

}  // namespace gtvr
