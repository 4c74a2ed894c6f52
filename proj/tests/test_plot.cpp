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
#include "gtvr/engine.hpp"
#include "gtvr/errors.hpp"
#include "gtvr/plot.hpp"

using namespace gtvr;

namespace {

RunConfig heterogeneous(AlgorithmKind kind) {
  RunConfig c;
  c.topology.nodes = 6;
  c.objective.type = ObjectiveType::Quadratic;
  c.objective.quadratic.spread = 2.0;
  c.algorithm = {kind, 0.05, std::nullopt};
  c.iterations = 3000;
  c.metrics_every = 10;
  return c;
}

// Least-squares slope of log10(y) against x over the last `tail` points.
double final_slope(const SvgCurve& c, std::size_t tail) {
  const std::size_t start = c.points.size() - tail;
  double mx = 0, my = 0;
  for (std::size_t i = start; i < c.points.size(); ++i) {
    mx += c.points[i].first;
    my += std::log10(c.points[i].second);
  }
  mx /= tail;
  my /= tail;
  double sxx = 0, sxy = 0;
  for (std::size_t i = start; i < c.points.size(); ++i) {
    sxx += (c.points[i].first - mx) * (c.points[i].first - mx);
    sxy += (c.points[i].first - mx) * (std::log10(c.points[i].second) - my);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("svg values parse back to the trace") {
  const MetricsTrace t = run(heterogeneous(AlgorithmKind::GtSaga)).trace;
  const std::string svg = render_svg("gap", {{"gt-saga", t}}, XAxis::Iteration);
  CHECK(svg.rfind("<svg", 0) == 0);
  const auto curves = parse_svg_curves(svg);
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].label == "gt-saga");

  std::vector<std::pair<double, double>> expected;
  double lo = 1e300, hi = -1e300;
  for (const auto& r : t.records) {
    if (r.gap > 0) {
      expected.emplace_back(static_cast<double>(r.iter), r.gap);
      lo = std::min(lo, std::log10(r.gap));
      hi = std::max(hi, std::log10(r.gap));
    }
  }
  REQUIRE(curves[0].points.size() == expected.size());
  // Coordinates are written to 0.01 px; the plot box is 340 px tall.
  const double decades = std::ceil(hi) - std::floor(lo);
  const double y_tol = 0.006 * decades / 340.0;
  const double x_tol = 0.006 * static_cast<double>(t.records.back().iter) / 540.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(curves[0].points[i].first - expected[i].first) <= x_tol);
    CHECK(std::abs(std::log10(curves[0].points[i].second) - std::log10(expected[i].second)) <= y_tol);
  }
}

TEST_CASE("gt-saga descends while dsgd plateaus") {
  const MetricsTrace saga = run(heterogeneous(AlgorithmKind::GtSaga)).trace;
  const MetricsTrace dsgd = run(heterogeneous(AlgorithmKind::Dsgd)).trace;
  // Restrict GT-SAGA to its linear phase, before it reaches machine precision.
  MetricsTrace head;
  for (const auto& r : saga.records) {
    if (r.gap > 1e-20) head.records.push_back(r);
  }
  const auto curves = parse_svg_curves(render_svg("gap", {{"gt-saga", head}, {"dsgd", dsgd}}, XAxis::Iteration));
  REQUIRE(curves.size() == 2);
  const double descent = final_slope(curves[0], curves[0].points.size() / 2);
  const double plateau = final_slope(curves[1], curves[1].points.size() / 2);
  CHECK(descent < -1e-3);
  CHECK(std::abs(plateau) < 1e-4);
  CHECK(descent < 20 * -std::abs(plateau));
}

TEST_CASE("plot scales and errors") {
  CHECK(plot_uses_log_scale("gap"));
  CHECK(plot_uses_log_scale("tracking_err"));
  CHECK_FALSE(plot_uses_log_scale("test_acc"));
  CHECK(parse_x_axis("iter") == XAxis::Iteration);
  CHECK_THROWS_AS(parse_x_axis("wall"), PlotError);
  CHECK_THROWS_AS(render_svg("gap", {{"empty", MetricsTrace{}}}, XAxis::Epoch), PlotError);
  // DSGD has no tracker, so that figure carries no curve.
  const MetricsTrace d = run(heterogeneous(AlgorithmKind::Dsgd)).trace;
  CHECK(render_svg("tracking_err", {{"dsgd", d}}, XAxis::Epoch).empty());
}
