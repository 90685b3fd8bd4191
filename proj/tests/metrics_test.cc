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

#include "ilmart/error.h"
#include "ilmart/metrics.h"
#include "test_util.h"

using namespace ilmart;

TEST_CASE("query without relevant documents scores 1") {
  const std::vector<int> labels{0, 0, 0};
  const std::vector<double> scores{0.3, -1.0, 2.0};
  CHECK(ndcg_at(labels, scores, 10) == 1.0);
}

TEST_CASE("three-document example") {
  const std::vector<int> labels{3, 2, 0};
  const std::vector<double> scores{0.5, 1.0, 0.2};
  const double dcg = 3.0 + 7.0 / std::log2(3.0);
  const double ideal = 7.0 + 3.0 / std::log2(3.0);
  CHECK(dcg == doctest::Approx(7.41645).epsilon(1e-5));
  CHECK(ideal == doctest::Approx(8.89279).epsilon(1e-5));
  CHECK(testing::brute_force_ideal_dcg(labels, 3) == doctest::Approx(ideal).epsilon(1e-14));
  CHECK(ndcg_at(labels, scores, 3) == doctest::Approx(0.833991).epsilon(1e-6));
  CHECK(ndcg_at(labels, scores, 3) == doctest::Approx(dcg / ideal).epsilon(1e-14));
}

TEST_CASE("ties keep the lower index first") {
  const std::vector<int> labels{1, 0};
  const std::vector<double> scores{0.0, 0.0};
  CHECK(ndcg_at(labels, scores, 2) == 1.0);
  const std::vector<int> reversed{0, 1};
  CHECK(ndcg_at(reversed, scores, 2) == doctest::Approx(1.0 / std::log2(3.0)));
}

TEST_CASE("errors") {
  const std::vector<int> labels{1, 0};
  const std::vector<double> one{0.0};
  const std::vector<double> two{0.0, 1.0};
  CHECK_THROWS_AS(ndcg_at(labels, one, 2), Error);
  CHECK_THROWS_AS(ndcg_at(labels, two, 0), Error);
}

TEST_CASE("matches the brute-force oracle on random small queries") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> size(1, 6), grade(0, 4), coarse(0, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int q = 0; q < 300; ++q) {
    const int n = size(rng);
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::vector<double> scores(labels.size());
    for (auto& l : labels) l = grade(rng);
    // Coarse scores make ties common.
    for (auto& s : scores) s = q % 2 ? u(rng) : coarse(rng);
    for (std::size_t k : {1u, 3u, 5u, 10u}) {
      CHECK(ndcg_at(labels, scores, k) ==
            doctest::Approx(testing::reference_ndcg(labels, scores, k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("mean over queries") {
  Dataset ds(1);
  const float x = 0.0f;
  ds.add_row("a", 2, {&x, 1});
  ds.add_row("a", 0, {&x, 1});
  ds.add_row("b", 1, {&x, 1});
  ds.add_row("b", 0, {&x, 1});
  const std::size_t cutoffs[] = {1, 10};
  SUBCASE("perfect ordering") {
    const std::vector<double> scores{2, 1, 2, 1};
    const auto r = mean_ndcg(ds, scores, cutoffs);
    CHECK(r.mean == std::vector<double>{1.0, 1.0});
    CHECK(r.num_queries() == 2);
  }
  SUBCASE("one query reversed") {
    const std::vector<double> scores{2, 1, 1, 2};
    const auto r = mean_ndcg(ds, scores, cutoffs);
    CHECK(r.per_query[1][0] == 1.0);
    CHECK(r.per_query[1][1] == doctest::Approx(1.0 / std::log2(3.0)));
    CHECK(r.mean[1] == doctest::Approx((1.0 + 1.0 / std::log2(3.0)) / 2.0));
    CHECK(r.mean[0] == doctest::Approx(0.5));
  }
  SUBCASE("missing scores") {
    const std::vector<double> scores{1, 2, 3};
    CHECK_THROWS_AS(mean_ndcg(ds, scores, cutoffs), Error);
  }
}

TEST_CASE("mean over twenty synthetic queries equals the per-query oracle") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> size(1, 6), grade(0, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset ds(1);
  const float x = 0.0f;
  std::vector<double> scores;
  for (int q = 0; q < 20; ++q) {
    const int n = size(rng);
    for (int d = 0; d < n; ++d) {
      ds.add_row(std::to_string(q), grade(rng), {&x, 1});
      scores.push_back(u(rng));
    }
  }
  const std::size_t cutoffs[] = {10};
  const auto r = mean_ndcg(ds, scores, cutoffs);
  double sum = 0.0;
  for (const auto& g : ds.groups()) {
    std::vector<int> labels;
    std::vector<double> s;
    for (auto row : g.rows) {
      labels.push_back(ds.label(row));
      s.push_back(scores[row]);
    }
    sum += testing::reference_ndcg(labels, s, 10);
  }
  CHECK(r.mean[0] == doctest::Approx(sum / 20.0).epsilon(1e-12));
}

TEST_CASE("properties") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> size(1, 12), grade(0, 4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(size(rng));
    std::vector<int> labels(n);
    std::vector<double> scores(n);
    for (auto& l : labels) l = grade(rng);
    for (auto& s : scores) s = u(rng);

    // Translation invariance.
    std::vector<double> shifted = scores;
    for (auto& s : shifted) s += 3.25;
    CHECK(ndcg_at(labels, shifted, 10) == doctest::Approx(ndcg_at(labels, scores, 10)));

    // Scores as an increasing function of the labels rank ideally.
    std::vector<double> ideal(n);
    for (std::size_t i = 0; i < n; ++i) ideal[i] = std::exp(labels[i]);
    CHECK(ndcg_at(labels, ideal, 5) == doctest::Approx(1.0).epsilon(1e-14));

    // DCG non-decreasing in the cutoff.
    for (std::size_t k = 1; k < n + 2; ++k) {
      CHECK(dcg_at(labels, scores, k) <= dcg_at(labels, scores, k + 1));
    }

    // Joint permutation (scores tie-free with probability 1).
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> pl(n);
    std::vector<double> ps(n);
    for (std::size_t i = 0; i < n; ++i) {
      pl[i] = labels[perm[i]];
      ps[i] = scores[perm[i]];
    }
    CHECK(ndcg_at(pl, ps, 10) == doctest::Approx(ndcg_at(labels, scores, 10)).epsilon(1e-14));

    const double v = ndcg_at(labels, scores, 3);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-15);
  }
}
