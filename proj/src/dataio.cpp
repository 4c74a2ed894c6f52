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

#include "gtvr/dataio.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "gtvr/errors.hpp"

namespace gtvr {
namespace {

struct RawSample {
  double label;
  std::vector<std::pair<std::size_t, double>> entries;
};

std::string line_error(std::size_t line, const std::string& what) {
  return "libsvm line " + std::to_string(line) + ": " + what;
}

double parse_number(std::string_view token, std::size_t line) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line_error(line, "cannot parse number '" + std::string(token) + "'"));
  }
  return value;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

RawSample parse_line(std::string_view text, std::size_t line) {
  const auto tokens = split_whitespace(text);
  RawSample raw{parse_number(tokens.front(), line), {}};
  std::size_t previous = 0;
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    const auto colon = tokens[t].find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_error(line, "expected idx:val, got '" + std::string(tokens[t]) + "'"));
    }
    const std::string_view idx_text = tokens[t].substr(0, colon);
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
    if (ec != std::errc() || ptr != idx_text.data() + idx_text.size() || idx == 0) {
      throw ParseError(line_error(line, "bad feature index '" + std::string(idx_text) + "'"));
    }
    if (idx <= previous) {
      throw ParseError(line_error(line, "feature indices must be strictly increasing"));
    }
    previous = idx;
    raw.entries.emplace_back(idx, parse_number(tokens[t].substr(colon + 1), line));
  }
  return raw;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> dimension) {
  std::vector<RawSample> raws;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    while (!view.empty() && (view.back() == '\r' || view.back() == ' ' || view.back() == '\t')) {
      view.remove_suffix(1);
    }
    if (view.find_first_not_of(" \t") == std::string_view::npos) continue;
    raws.push_back(parse_line(view, line_no));
    line_numbers.push_back(line_no);
    if (!raws.back().entries.empty()) {
      max_index = std::max(max_index, raws.back().entries.back().first);
    }
  }

  const std::size_t p = dimension.value_or(max_index);
  std::map<double, int> labels;
  for (std::size_t s = 0; s < raws.size(); ++s) {
    if (!raws[s].entries.empty() && raws[s].entries.back().first > p) {
      throw DimensionError(line_error(line_numbers[s], "feature index " +
                                                           std::to_string(raws[s].entries.back().first) +
                                                           " exceeds dimension " + std::to_string(p)));
    }
    labels.emplace(raws[s].label, 0);
  }
  if (labels.size() > 2) {
    throw ParseError("libsvm: more than two distinct labels; only binary classification is supported");
  }
  if (labels.size() == 2) {
    labels.begin()->second = -1;
    labels.rbegin()->second = 1;
  } else if (labels.size() == 1) {
    // A lone label is read by sign: {-1, 0} -> -1, positive -> +1.
    labels.begin()->second = labels.begin()->first > 0.0 ? 1 : -1;
  }

  Dataset out;
  out.reserve(raws.size());
  for (const auto& raw : raws) {
    Sample s;
    s.features = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    for (const auto& [idx, val] : raw.entries) s.features(static_cast<Eigen::Index>(idx - 1)) = val;
    s.label = labels.at(raw.label);
    out.push_back(std::move(s));
  }
  return out;
}

Dataset read_libsvm(const std::filesystem::path& path, std::optional<std::size_t> dimension) {
  if (!std::filesystem::exists(path)) {
    throw IoError("dataset file not found: " + path.string());
  }
  if (path.extension() == ".gz") {
    gzFile file = gzopen(path.c_str(), "rb");
    if (file == nullptr) throw IoError("cannot open gzip file: " + path.string());
    std::string text;
    char buffer[1 << 16];
    int got = 0;
    while ((got = gzread(file, buffer, sizeof(buffer))) > 0) text.append(buffer, static_cast<std::size_t>(got));
    const bool failed = got < 0;
    gzclose(file);
    if (failed) throw IoError("corrupt gzip stream: " + path.string());
    std::istringstream in(text);
    return parse_libsvm(in, dimension);
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path.string());
  return parse_libsvm(in, dimension);
}

void write_libsvm(std::ostream& out, const Dataset& samples) {
  char buffer[64];
  for (const auto& s : samples) {
    out << (s.label > 0 ? "+1" : "-1");
    for (Eigen::Index k = 0; k < s.features.size(); ++k) {
      if (s.features(k) == 0.0) continue;
      const auto res = std::to_chars(buffer, buffer + sizeof(buffer), s.features(k));
      out << ' ' << (k + 1) << ':' << std::string_view(buffer, static_cast<std::size_t>(res.ptr - buffer));
    }
    out << '\n';
  }
}

Dataset normalize_unit(Dataset samples) {
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const double norm = samples[s].features.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw NormalizationError("sample " + std::to_string(s) + " has a zero or non-finite feature vector");
    }
    samples[s].features /= norm;
  }
  return samples;
}

Partition::Partition(std::vector<std::pair<std::size_t, std::size_t>> ranges)
    : ranges_(std::move(ranges)) {
  std::size_t expected = 0;
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    if (ranges_[i].first != expected || ranges_[i].second <= ranges_[i].first) {
      throw PartitionError("partition range for node " + std::to_string(i) +
                           " is empty or not contiguous");
    }
    expected = ranges_[i].second;
  }
}

std::vector<std::size_t> Partition::counts() const {
  std::vector<std::size_t> c;
  c.reserve(ranges_.size());
  for (std::size_t i = 0; i < ranges_.size(); ++i) c.push_back(count(i));
  return c;
}

std::size_t Partition::max_count() const {
  const auto c = counts();
  return c.empty() ? 0 : *std::max_element(c.begin(), c.end());
}

std::size_t Partition::min_count() const {
  const auto c = counts();
  return c.empty() ? 0 : *std::min_element(c.begin(), c.end());
}

Partition partition_even(std::size_t samples, std::size_t nodes) {
  if (nodes == 0) throw PartitionError("partition needs at least one node");
  if (samples < nodes) {
    throw PartitionError("cannot split " + std::to_string(samples) + " samples over " +
                         std::to_string(nodes) + " nodes");
  }
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  const std::size_t base = samples / nodes;
  const std::size_t extra = samples % nodes;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const std::size_t size = base + (i < extra ? 1 : 0);
    ranges.emplace_back(begin, begin + size);
    begin += size;
  }
  return Partition(std::move(ranges));
}

Partition partition_proportional(std::size_t samples, const std::vector<double>& proportions) {
  const std::size_t nodes = proportions.size();
  if (nodes == 0) throw PartitionError("partition needs at least one node");
  if (samples < nodes) {
    throw PartitionError("cannot split " + std::to_string(samples) + " samples over " +
                         std::to_string(nodes) + " nodes");
  }
  double total = 0.0;
  for (double p : proportions) {
    if (!(p > 0.0)) throw PartitionError("partition proportions must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw PartitionError("partition proportions must sum to 1");

  std::vector<long long> counts(nodes);
  long long assigned = 0;
  for (std::size_t i = 0; i < nodes; ++i) {
    counts[i] = std::llround(static_cast<double>(samples) * proportions[i]);
    assigned += counts[i];
  }
  const auto largest = static_cast<std::size_t>(
      std::max_element(proportions.begin(), proportions.end()) - proportions.begin());
  counts[largest] += static_cast<long long>(samples) - assigned;

  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < nodes; ++i) {
    if (counts[i] < 1) {
      throw PartitionError("proportion for node " + std::to_string(i) + " yields no samples");
    }
    ranges.emplace_back(begin, begin + static_cast<std::size_t>(counts[i]));
    begin += static_cast<std::size_t>(counts[i]);
  }
  return Partition(std::move(ranges));
}

Dataset shuffle_samples(Dataset samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::shuffle(samples.begin(), samples.end(), gen);
  return samples;
}

Dataset synth_logistic(std::size_t samples, std::size_t dimension, std::uint64_t seed,
                       double separation) {
  if (samples < 2) throw InvalidArgument("synthetic data needs at least two samples");
  if (dimension < 1) throw InvalidArgument("synthetic data needs dimension >= 1");
  const auto p = static_cast<Eigen::Index>(dimension);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  Eigen::VectorXd direction(p);
  do {
    for (Eigen::Index k = 0; k < p; ++k) direction(k) = normal(gen);
  } while (direction.norm() == 0.0);
  direction.normalize();

  Dataset out;
  out.reserve(samples);
  while (out.size() < samples) {
    Sample s;
    s.label = coin(gen) ? 1 : -1;
    s.features = static_cast<double>(s.label) * separation * direction;
    for (Eigen::Index k = 0; k < p; ++k) s.features(k) += normal(gen);
    const double norm = s.features.norm();
    if (norm == 0.0) continue;
    s.features /= norm;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace gtvr
