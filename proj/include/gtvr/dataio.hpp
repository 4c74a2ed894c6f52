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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gtvr {

struct Sample {
  Eigen::VectorXd features;
  int label = 1;  // -1 or +1
};

using Dataset = std::vector<Sample>;

// LIBSVM text: "<label> <idx>:<val> ..." with 1-based increasing indices.
// dimension == nullopt means the largest index seen. Labels are mapped to
// +-1 (smaller distinct value -> -1); more than two distinct labels is an error.
Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> dimension = std::nullopt);

// Reads a file, transparently decompressing when the name ends in ".gz".
Dataset read_libsvm(const std::filesystem::path& path,
                    std::optional<std::size_t> dimension = std::nullopt);

void write_libsvm(std::ostream& out, const Dataset& samples);

Dataset normalize_unit(Dataset samples);

// Contiguous per-node index ranges [begin, end).
class Partition {
 public:
  explicit Partition(std::vector<std::pair<std::size_t, std::size_t>> ranges);

  std::size_t nodes() const { return ranges_.size(); }
  const std::pair<std::size_t, std::size_t>& range(std::size_t node) const { return ranges_[node]; }
  std::size_t count(std::size_t node) const { return ranges_[node].second - ranges_[node].first; }
  std::vector<std::size_t> counts() const;
  std::size_t max_count() const;
  std::size_t min_count() const;
  std::size_t total() const { return ranges_.empty() ? 0 : ranges_.back().second; }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> ranges_;
};

// Counts differ by at most one; the first N mod n nodes get the extra sample.
Partition partition_even(std::size_t samples, std::size_t nodes);

// m_i = round(N p_i); rounding remainder goes to the largest-proportion node.
Partition partition_proportional(std::size_t samples, const std::vector<double>& proportions);

Dataset shuffle_samples(Dataset samples, std::uint64_t seed);

// Two Gaussian clusters at +-separation*u (u a random unit direction), unit
// normalized. Deterministic in seed.
Dataset synth_logistic(std::size_t samples, std::size_t dimension, std::uint64_t seed,
                       double separation);

}  // namespace gtvr
