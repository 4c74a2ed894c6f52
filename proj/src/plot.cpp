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

#include "gtvr/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include "gtvr/errors.hpp"

namespace gtvr {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 620.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 360.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                               "#9467bd", "#8c564b", "#e377c2", "#17becf"};

double metric_value(const MetricsRecord& r, std::string_view metric) {
  if (metric == "gap") return r.gap;
  if (metric == "consensus_err") return r.consensus_err;
  if (metric == "tracking_err") return r.tracking_err;
  if (metric == "msd") return r.msd;
  if (metric == "test_acc") return r.test_acc;
  throw PlotError("unknown metric '" + std::string(metric) + "'");
}

std::string fmt(double v, const char* spec = "%.2f") {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), spec, v);
  return buffer;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape(std::string s) {
  const std::pair<const char*, char> table[] = {{"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&amp;", '&'}};
  for (const auto& [from, to] : table) {
    std::string::size_type pos = 0;
    const std::string needle(from);
    while ((pos = s.find(needle, pos)) != std::string::npos) {
      s.replace(pos, needle.size(), 1, to);
      ++pos;
    }
  }
  return s;
}

}  // namespace

XAxis parse_x_axis(std::string_view style) {
  if (style == "epoch") return XAxis::Epoch;
  if (style == "iter" || style == "iteration") return XAxis::Iteration;
  throw PlotError("unknown plot style '" + std::string(style) + "' (expected epoch or iter)");
}

const std::vector<std::string>& plot_metrics() {
  static const std::vector<std::string> metrics = {"gap", "consensus_err", "tracking_err", "msd",
                                                   "test_acc"};
  return metrics;
}

bool plot_uses_log_scale(std::string_view metric) { return metric != "test_acc"; }

std::string render_svg(std::string_view metric, const std::vector<PlotSeries>& series, XAxis x_axis) {
  const bool log_y = plot_uses_log_scale(metric);
  std::vector<std::vector<std::pair<double, double>>> curves;
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series) {
    if (s.trace.records.empty()) throw PlotError("trace '" + s.label + "' is empty");
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : s.trace.records) {
      const double x = x_axis == XAxis::Epoch ? r.epoch : static_cast<double>(r.iter);
      const double v = metric_value(r, metric);
      if (!std::isfinite(v) || (log_y && v <= 0.0)) continue;
      const double y = log_y ? std::log10(v) : v;
      pts.emplace_back(x, y);
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
    curves.push_back(std::move(pts));
  }
  if (!std::isfinite(x_min)) return {};
  if (x_max == x_min) x_max = x_min + 1.0;
  if (log_y) {
    y_min = std::floor(y_min);
    y_max = std::ceil(y_max);
  } else {
    y_min = std::min(0.0, y_min);
    y_max = std::max(1.0, y_max);
  }
  if (y_max == y_min) y_max = y_min + 1.0;

  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft); };
  auto py = [&](double y) { return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" data-metric=\"" << metric << "\" data-x-min=\"" << fmt(x_min, "%.17g") << "\" data-x-max=\""
      << fmt(x_max, "%.17g") << "\" data-y-min=\"" << fmt(y_min, "%.17g") << "\" data-y-max=\""
      << fmt(y_max, "%.17g") << "\" data-y-log=\"" << (log_y ? 1 : 0) << "\" data-box=\"" << kLeft << ' '
      << kTop << ' ' << kRight << ' ' << kBottom << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kRight - kLeft << "\" height=\""
      << kBottom - kTop << "\" fill=\"none\" stroke=\"black\"/>\n";

  const int y_ticks = log_y ? static_cast<int>(y_max - y_min) : 5;
  const int y_step = log_y ? std::max(1, y_ticks / 8) : 1;
  for (int t = 0; t <= y_ticks; t += y_step) {
    const double y = y_min + (y_max - y_min) * t / y_ticks;
    svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << fmt(py(y)) << "\" x2=\"" << kLeft << "\" y2=\""
        << fmt(py(y)) << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(py(y) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
        << (log_y ? "1e" + fmt(y, "%.0f") : fmt(y, "%.1f")) << "</text>\n";
  }
  for (int t = 0; t <= 5; ++t) {
    const double x = x_min + (x_max - x_min) * t / 5.0;
    svg << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << kBottom << "\" x2=\"" << fmt(px(x)) << "\" y2=\""
        << kBottom + 4 << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << fmt(px(x)) << "\" y=\"" << kBottom + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(x, "%.4g") << "</text>\n";
  }
  svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 12
      << "\" font-size=\"13\" text-anchor=\"middle\">" << (x_axis == XAxis::Epoch ? "epoch" : "iteration")
      << "</text>\n";
  svg << "<text x=\"16\" y=\"" << (kTop + kBottom) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 16 " << (kTop + kBottom) / 2 << ")\">" << metric << "</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kColors[c % std::size(kColors)];
    svg << "<polyline class=\"curve\" data-label=\"" << escape(series[c].label) << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < curves[c].size(); ++k) {
      if (k) svg << ' ';
      svg << fmt(px(curves[c][k].first)) << ',' << fmt(py(curves[c][k].second));
    }
    svg << "\"/>\n";
    const double ly = kTop + 16 + 16 * static_cast<double>(c);
    svg << "<line x1=\"" << kRight - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kRight - 130 << "\" y2=\""
        << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    svg << "<text x=\"" << kRight - 125 << "\" y=\"" << ly << "\" font-size=\"11\">" << escape(series[c].label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> write_plots(const std::vector<PlotSeries>& series,
                                               const std::filesystem::path& out_dir, XAxis x_axis) {
  if (series.empty()) throw PlotError("no traces to plot");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& metric : plot_metrics()) {
    const std::string svg = render_svg(metric, series, x_axis);
    if (svg.empty()) continue;
    const auto path = out_dir / (metric + ".svg");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << svg;
    written.push_back(path);
  }
  return written;
}

std::vector<SvgCurve> parse_svg_curves(const std::string& svg) {
  auto attr = [&](const std::string& name) {
    const std::regex re(name + "=\"([^\"]*)\"");
    std::smatch m;
    if (!std::regex_search(svg, m, re)) throw PlotError("svg lacks attribute " + name);
    return m[1].str();
  };
  const double x_min = std::stod(attr("data-x-min"));
  const double x_max = std::stod(attr("data-x-max"));
  const double y_min = std::stod(attr("data-y-min"));
  const double y_max = std::stod(attr("data-y-max"));
  const bool log_y = attr("data-y-log") == "1";

  std::vector<SvgCurve> curves;
  const std::regex poly("<polyline class=\"curve\" data-label=\"([^\"]*)\"[^>]* points=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it) {
    SvgCurve curve;
    curve.label = unescape((*it)[1].str());
    std::istringstream pts((*it)[2].str());
    std::string pair;
    while (pts >> pair) {
      const auto comma = pair.find(',');
      const double sx = std::stod(pair.substr(0, comma));
      const double sy = std::stod(pair.substr(comma + 1));
      const double x = x_min + (sx - kLeft) / (kRight - kLeft) * (x_max - x_min);
      const double y = y_min + (kBottom - sy) / (kBottom - kTop) * (y_max - y_min);
      curve.points.emplace_back(x, log_y ? std::pow(10.0, y) : y);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace gtvr
