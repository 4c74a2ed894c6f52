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

#include "gtvr/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gtvr/errors.hpp"

namespace gtvr {
namespace {

void check_assumptions(double mu, double L, double sigma) {
  if (!(mu > 0.0)) throw AssumptionError("tuning requires mu > 0 (strong convexity)");
  if (!(L >= mu)) throw AssumptionError("tuning requires L >= mu");
  if (!(sigma >= 0.0 && sigma < 1.0)) {
    throw AssumptionError("tuning requires 0 <= sigma < 1 (connected network), got sigma = " +
                          std::to_string(sigma));
  }
}

std::uint64_t contraction_steps(double eps, double rate) {
  if (!(eps > 0.0)) throw InvalidArgument("target accuracy must be positive");
  if (eps >= 1.0) return 0;
  return static_cast<std::uint64_t>(std::ceil(std::log(eps) / std::log(rate)));
}

}  // namespace

std::uint64_t TuningReport::iterations_to(double eps) const {
  const std::uint64_t steps = contraction_steps(eps, rate);
  return kind == AlgorithmKind::GtSvrg ? steps * inner_loop : steps;
}

std::uint64_t TuningReport::gradient_evals_to(double eps, std::size_t M) const {
  const std::uint64_t steps = contraction_steps(eps, rate);
  if (kind == AlgorithmKind::GtSvrg) return steps * (2 * inner_loop + M);
  return steps;
}

TuningReport saga_tuning(double mu, double L, double sigma, std::size_t M, std::size_t m) {
  check_assumptions(mu, L, sigma);
  if (m < 1 || M < m) throw AssumptionError("tuning requires M >= m >= 1");
  const double Q = L / mu;
  const double gap_sq = (1.0 - sigma * sigma) * (1.0 - sigma * sigma);
  const double Md = static_cast<double>(M);
  const double md = static_cast<double>(m);

  TuningReport r;
  r.kind = AlgorithmKind::GtSaga;
  r.alpha = std::min(1.0 / (5.0 * mu * Md), md * gap_sq / (320.0 * Md * L * Q));
  r.rate = 1.0 - std::min(1.0 / (20.0 * Md), md * gap_sq / (1280.0 * Md * Q * Q));
  r.big_data = big_data_check(M, m, Q, sigma);
  return r;
}

TuningReport svrg_tuning(double mu, double L, double sigma) {
  check_assumptions(mu, L, sigma);
  const double Q = L / mu;
  const double gap_sq = (1.0 - sigma * sigma) * (1.0 - sigma * sigma);

  TuningReport r;
  r.kind = AlgorithmKind::GtSvrg;
  r.alpha = gap_sq / (187.0 * Q * L);
  r.inner_loop = static_cast<std::size_t>(std::ceil(1496.0 * Q * Q / gap_sq * std::log(200.0 * Q)));
  r.rate = 0.7;
  return r;
}

bool big_data_check(std::size_t M, std::size_t m, double Q, double sigma) {
  if (m == 0 || !(sigma < 1.0)) return false;
  const double bound = 10.0 * Q * Q / ((1.0 - sigma) * (1.0 - sigma));
  return static_cast<double>(m) >= bound &&
         static_cast<double>(M) <= 1.25 * static_cast<double>(m);
}

nlohmann::json to_json(const TuningReport& report) {
  nlohmann::json j;
  j["algorithm"] = to_string(report.kind);
  j["alpha"] = report.alpha;
  if (report.kind == AlgorithmKind::GtSvrg) j["inner_loop"] = report.inner_loop;
  j["rate"] = report.rate;
  j["rate_unit"] = report.kind == AlgorithmKind::GtSvrg ? "outer_loop" : "iteration";
  j["big_data"] = report.big_data;
  j["note"] = "iteration predictions are up to an unreported constant";
  return j;
}

}  // namespace gtvr
