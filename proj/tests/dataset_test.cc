// Copyright 2026 The ilmart Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>
#include <sstream>

#include "ilmart/dataset.h"
#include "ilmart/error.h"
#include "test_util.h"

using namespace ilmart;

namespace {

Dataset parse(const std::string& text, LoadOptions options = {}) {
  std::istringstream in(text);
  return parse_svmlight(in, options);
}

Dataset column(std::vector<float> values) {
  Dataset ds(1);
  for (float v : values) ds.add_row("q", 0, std::span<const float>(&v, 1));
  return ds;
}

}  // namespace

TEST_CASE("parses a LETOR line and fills missing features with zero") {
  const Dataset ds = parse("2 qid:7 1:0.5 3:-1.0\n");
  REQUIRE(ds.num_rows() == 1);
  CHECK(ds.num_features() == 3);
  CHECK(ds.label(0) == 2);
  CHECK(ds.qid(0) == "7");
  const auto row = ds.row(0);
  CHECK(row[0] == 0.5f);
  CHECK(row[1] == 0.0f);
  CHECK(row[2] == -1.0f);
}

TEST_CASE("groups rows by qid in file order") {
  const Dataset ds = parse("1 qid:1 1:1\n0 qid:1 1:2\n3 qid:2 1:3\n");
  REQUIRE(ds.num_queries() == 2);
  CHECK(ds.groups()[0].rows == std::vector<std::size_t>{0, 1});
  CHECK(ds.groups()[1].rows == std::vector<std::size_t>{2});
  CHECK(ds.groups()[0].qid == "1");
}

TEST_CASE("non-contiguous qids join their first group") {
  const Dataset ds = parse("1 qid:a 1:1\n0 qid:b 1:2\n3 qid:a 1:3\n");
  REQUIRE(ds.num_queries() == 2);
  CHECK(ds.groups()[0].rows == std::vector<std::size_t>{0, 2});
}

TEST_CASE("comments, blank lines and widening") {
  const Dataset ds = parse("# header\n\n0 qid:1 2:1.5 # doc a\n1 qid:1 5:2\n");
  CHECK(ds.num_rows() == 2);
  CHECK(ds.num_features() == 5);
  CHECK(ds.value(0, 1) == 1.5f);
  CHECK(ds.value(0, 4) == 0.0f);
  CHECK(ds.value(1, 4) == 2.0f);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_WITH_AS(parse("2 qid:7 0:1.0\n"), doctest::Contains("feature id must be >= 1"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse("1 qid:1 1:1\nx qid:1 1:1\n"), doctest::Contains("line 2"),
                       ParseError);
  CHECK_THROWS_AS(parse("1.5 qid:1 1:1\n"), ParseError);
  CHECK_THROWS_AS(parse("1 1:1\n"), ParseError);
  CHECK_THROWS_AS(parse("1 qid:1 1-1\n"), ParseError);
  CHECK_THROWS_AS(parse("1 qid:1 1:abc\n"), ParseError);
  CHECK_THROWS_AS(parse("32 qid:1 1:1\n"), ParseError);
  CHECK_THROWS_AS(parse("-1 qid:1 1:1\n"), ParseError);
  CHECK_THROWS_WITH_AS(parse(""), doctest::Contains("empty"), ParseError);
  CHECK_THROWS_AS(parse("# only a comment\n"), ParseError);
}

TEST_CASE("num_features override pads and rejects larger ids") {
  LoadOptions options;
  options.num_features = 6;
  const Dataset ds = parse("1 qid:1 2:1\n", options);
  CHECK(ds.num_features() == 6);
  options.num_features = 1;
  CHECK_THROWS_AS(parse("1 qid:1 2:1\n", options), ParseError);
}

TEST_CASE("allow_empty yields an empty dataset") {
  LoadOptions options;
  options.allow_empty = true;
  options.num_features = 4;
  const Dataset ds = parse("", options);
  CHECK(ds.empty());
  CHECK(ds.num_features() == 4);
}

TEST_CASE("write/reload round trip preserves labels, qids and values") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<float> u(-1e3f, 1e3f);
  std::bernoulli_distribution zero(0.3);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset ds(8);
    std::vector<float> x(8);
    for (int r = 0; r < 30; ++r) {
      for (auto& v : x) v = zero(rng) ? 0.0f : u(rng);
      x[7] = 1.0f + static_cast<float>(r);  // keeps d = 8 after reload
      ds.add_row("q" + std::to_string(r / 4), r % 5, x);
    }
    std::stringstream text;
    write_svmlight(ds, text);
    const Dataset back = parse(text.str());
    REQUIRE(back.num_rows() == ds.num_rows());
    REQUIRE(back.num_features() == ds.num_features());
    for (std::size_t i = 0; i < ds.num_rows(); ++i) {
      CHECK(back.label(i) == ds.label(i));
      CHECK(back.qid(i) == ds.qid(i));
      for (std::size_t j = 0; j < 8; ++j) CHECK(back.value(i, j) == ds.value(i, j));
    }
    CHECK(back.digest() == ds.digest());
  }
}

TEST_CASE("group sizes partition the rows") {
  const Dataset ds = testing::planted_interaction(13, 7, 3);
  std::size_t total = 0;
  std::set<std::size_t> seen;
  for (const auto& g : ds.groups()) {
    CHECK(!g.rows.empty());
    total += g.rows.size();
    seen.insert(g.rows.begin(), g.rows.end());
  }
  CHECK(total == ds.num_rows());
  CHECK(seen.size() == ds.num_rows());
}

TEST_CASE("constant feature has one bin") {
  const BinMapper m = build_bins(column({1, 1, 1, 1}), 255);
  CHECK(m.num_bins(0) == 1);
  CHECK(m.bin_of(0, 1.0) == 0);
}

TEST_CASE("four values into two bins split at the median") {
  const Dataset ds = column({1, 2, 3, 4});
  const BinMapper m = build_bins(ds, 2);
  REQUIRE(m.num_bins(0) == 2);
  CHECK(m.boundaries(0)[0] == 2.5);
  const auto bins = m.apply(ds);
  CHECK(bins.bin(0, 0) == 0);
  CHECK(bins.bin(1, 0) == 0);
  CHECK(bins.bin(2, 0) == 1);
  CHECK(bins.bin(3, 0) == 1);
}

TEST_CASE("ten distinct values get one bin each") {
  std::vector<float> values;
  for (int i = 1; i <= 10; ++i) values.push_back(static_cast<float>(i) / 10.0f);
  const Dataset ds = column(values);
  const BinMapper m = build_bins(ds, 255);
  CHECK(m.num_bins(0) == 10);
  // Oracle: distinct values mapped to distinct bins, in order.
  std::set<int> bins;
  for (float v : values) bins.insert(m.bin_of(0, v));
  CHECK(bins.size() == 10);
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(m.bin_of(0, values[i]) == static_cast<int>(i));
  }
}

TEST_CASE("binning is monotone, bounded and keeps equal values together") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int max_bins = 2 + trial * 25;
    std::uniform_int_distribution<int> pick(0, 400);
    std::vector<float> values(2000);
    for (auto& v : values) v = static_cast<float>(pick(rng)) * 0.37f;
    const Dataset ds = column(values);
    const BinMapper m = build_bins(ds, max_bins);
    CHECK(m.num_bins(0) <= max_bins);
    const auto& b = m.boundaries(0);
    for (std::size_t k = 1; k < b.size(); ++k) CHECK(b[k - 1] < b[k]);
    std::vector<float> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      CHECK(m.bin_of(0, sorted[i - 1]) <= m.bin_of(0, sorted[i]));
    }
  }
}

TEST_CASE("bin index routing agrees with boundary comparison") {
  const Dataset ds = testing::planted_interaction(20, 10, 5);
  const BinMapper m = build_bins(ds, 16);
  const auto bins = m.apply(ds);
  for (std::size_t j = 0; j < ds.num_features(); ++j) {
    for (int b = 0; b + 1 < m.num_bins(j); ++b) {
      for (std::size_t i = 0; i < ds.num_rows(); ++i) {
        CHECK((ds.value(i, j) <= m.threshold(j, b)) == (bins.bin(i, j) <= b));
      }
    }
  }
}

TEST_CASE("max_bins outside [2, 256] is rejected") {
  CHECK_THROWS_AS(build_bins(column({1, 2}), 1), ConfigError);
  CHECK_THROWS_AS(build_bins(column({1, 2}), 257), ConfigError);
}
