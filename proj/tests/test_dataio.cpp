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
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <zlib.h>

#include "doctest.h"
#include "gtvr/dataio.hpp"
#include "gtvr/errors.hpp"

using namespace gtvr;

namespace {

Dataset parse(const std::string& text, std::optional<std::size_t> p = std::nullopt) {
  std::istringstream in(text);
  return parse_libsvm(in, p);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("libsvm parsing") {
  auto d = parse("+1 1:0.5 3:-0.25\n", 3);
  REQUIRE(d.size() == 1);
  CHECK(d[0].label == 1);
  CHECK(d[0].features == vec({0.5, 0, -0.25}));

  d = parse("0 2:1\n", 2);
  CHECK(d[0].label == -1);
  CHECK(d[0].features == vec({0, 1}));

  d = parse("1 1:1\r\n2 2:1 # comment\n\n", std::nullopt);
  CHECK(d.size() == 2);
  CHECK(d[0].label == -1);
  CHECK(d[1].label == 1);
  CHECK(d[0].features.size() == 2);

  d = parse("-1 1:1\n+1 2:1\n");
  CHECK(d[0].label == -1);
  CHECK(d[1].label == 1);
}

TEST_CASE("libsvm errors name the line") {
  auto expect_line = [](const std::string& text, const std::string& needle, auto tag) {
    try {
      parse(text, 3);
      FAIL("expected an error");
    } catch (const decltype(tag)& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_line("1 1:1\n1 x:2\n", "line 2", ParseError(""));
  expect_line("1 2:1 1:1\n", "line 1", ParseError(""));
  expect_line("1 4:1\n", "line 1", DimensionError(""));
  expect_line("1 1:1\n2 1:1\n3 1:1\n", "more than two", ParseError(""));
}

TEST_CASE("libsvm round trip") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(0.5);
  Dataset in;
  for (int s = 0; s < 100; ++s) {
    Sample x;
    x.features.resize(6);
    for (int k = 0; k < 6; ++k) x.features(k) = coin(gen) ? normal(gen) : 0.0;
    x.label = coin(gen) ? 1 : -1;
    in.push_back(x);
  }
  in[0].label = 1;
  in[1].label = -1;
  std::ostringstream out;
  write_libsvm(out, in);
  const auto back = parse(out.str(), 6);
  REQUIRE(back.size() == in.size());
  for (std::size_t s = 0; s < in.size(); ++s) {
    CHECK(back[s].label == in[s].label);
    CHECK(back[s].features == in[s].features);
  }
}

TEST_CASE("gzip input and missing files") {
  const auto dir = std::filesystem::temp_directory_path() / "gtvr_dataio_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "tiny.svm.gz";
  {
    gzFile f = gzopen(path.string().c_str(), "wb");
    REQUIRE(f != nullptr);
    const std::string text = "1 1:3 2:4\n-1 2:1\n";
    gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
    gzclose(f);
  }
  const auto d = read_libsvm(path);
  REQUIRE(d.size() == 2);
  CHECK(d[0].features == vec({3, 4}));
  try {
    read_libsvm(dir / "absent.svm");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("absent.svm") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("unit normalization") {
  Dataset d{{vec({3, 4}), 1}, {vec({1, 0}), -1}};
  const auto n = normalize_unit(d);
  CHECK(n[0].features(0) == doctest::Approx(0.6));
  CHECK(n[0].features(1) == doctest::Approx(0.8));
  CHECK((n[1].features - vec({1, 0})).norm() <= 1e-15);
  const auto twice = normalize_unit(n);
  for (std::size_t s = 0; s < n.size(); ++s) CHECK((twice[s].features - n[s].features).norm() <= 1e-15);

  const auto synth = normalize_unit(synth_logistic(300, 7, 3, 2.0));
  for (const auto& s : synth) CHECK(std::abs(s.features.norm() - 1.0) <= 1e-12);

  try {
    normalize_unit({{vec({1, 1}), 1}, {vec({0, 0}), 1}});
    FAIL("expected an error");
  } catch (const NormalizationError& e) {
    CHECK(std::string(e.what()).find('1') != std::string::npos);
  }
}

TEST_CASE("partitions") {
  CHECK(partition_even(10, 2).counts() == std::vector<std::size_t>{5, 5});
  CHECK(partition_even(10, 3).counts() == std::vector<std::size_t>{4, 3, 3});
  const auto p = partition_proportional(100, {0.9, 0.1});
  CHECK(p.counts() == std::vector<std::size_t>{90, 10});
  CHECK(p.max_count() / p.min_count() == 9);
  CHECK_THROWS_AS(partition_even(2, 3), PartitionError);
  CHECK_THROWS_AS(partition_proportional(10, {0.5, 0.4}), PartitionError);
  CHECK_THROWS_AS(partition_proportional(10, {0.99, 0.01}), PartitionError);

  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 9;
    const std::size_t N = n + gen() % 200;
    std::vector<Partition> parts{partition_even(N, n)};
    std::vector<double> w(n);
    double total = 0;
    for (auto& x : w) total += (x = 1.0 + static_cast<double>(gen() % 5));
    for (auto& x : w) x /= total;
    if (N >= 10 * n) parts.push_back(partition_proportional(N, w));
    for (const auto& part : parts) {
      std::size_t next = 0;
      for (std::size_t i = 0; i < part.nodes(); ++i) {
        CHECK(part.range(i).first == next);
        CHECK(part.count(i) >= 1);
        next = part.range(i).second;
      }
      CHECK(next == N);
    }
  }
}

TEST_CASE("synthetic logistic data") {
  const auto a = synth_logistic(200, 4, 11, 1.0);
  const auto b = synth_logistic(200, 4, 11, 1.0);
  for (std::size_t s = 0; s < a.size(); ++s) {
    CHECK(a[s].label == b[s].label);
    CHECK(a[s].features == b[s].features);
  }

  // Without separation, labels carry no signal: the class means coincide.
  const auto noise = synth_logistic(20000, 3, 12, 0.0);
  Eigen::VectorXd pos = Eigen::VectorXd::Zero(3), neg = Eigen::VectorXd::Zero(3);
  double np = 0, nn = 0;
  for (const auto& s : noise) {
    if (s.label > 0) {
      pos += s.features;
      ++np;
    } else {
      neg += s.features;
      ++nn;
    }
  }
  CHECK((pos / np - neg / nn).norm() < 0.05);

  const auto shuffled = shuffle_samples(a, 3);
  std::multiset<double> x, y;
  for (const auto& s : a) x.insert(s.features(0));
  for (const auto& s : shuffled) y.insert(s.features(0));
  CHECK(x == y);
}
