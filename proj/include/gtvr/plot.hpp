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

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gtvr/engine.hpp"

namespace gtvr {

struct PlotSeries {
  std::string label;
  MetricsTrace trace;
};

enum class XAxis { Epoch, Iteration };

XAxis parse_x_axis(std::string_view style);

// Metric columns that get a figure, in output order.
const std::vector<std::string>& plot_metrics();
bool plot_uses_log_scale(std::string_view metric);

// Self-contained SVG with one polyline per series. Returns an empty string
// when no series has a plottable point for the metric.
std::string render_svg(std::string_view metric, const std::vector<PlotSeries>& series, XAxis x_axis);

// Writes <metric>.svg files under out_dir; returns the written paths.
std::vector<std::filesystem::path> write_plots(const std::vector<PlotSeries>& series,
                                               const std::filesystem::path& out_dir, XAxis x_axis);

struct SvgCurve {
  std::string label;
  std::vector<std::pair<double, double>> points;  // data coordinates
};

// Inverse of render_svg's coordinate mapping, for checking figures textually.
std::vector<SvgCurve> parse_svg_curves(const std::string& svg);

}  // namespace gtvr
