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

#ifndef ILMART_TESTS_TEST_UTIL_H_
#define ILMART_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ilmart/config.h"
#include "ilmart/dataset.h"
#include "ilmart/metrics.h"

namespace ilmart::testing {

// Relevance = max(round(f(x1) + g(x2) + 2 h(x4, x5) + noise), 0) with
// f saturating, g linear and h a smooth AND of x4 > 0.5 and x5 > 0.5. All
// features are uniform on [0, 1]; features 3 and 6..10 are noise. With fewer
// than 5 features the missing ones are still drawn but not stored.
inline Dataset planted_interaction(std::size_t queries, std::size_t docs, std::uint64_t seed,
                                   std::size_t num_features = 10, double noise = 0.25) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::normal_distribution<double> eps(0.0, noise);
  auto sigmoid = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  Dataset ds(num_features);
  std::vector<float> x(std::max<std::size_t>(num_features, 5));
  for (std::size_t q = 0; q < queries; ++q) {
    const std::string qid = std::to_string(q + 1);
    for (std::size_t d = 0; d < docs; ++d) {
      for (auto& v : x) v = u(rng);
      const double f = 1.5 * (1.0 - std::exp(-3.0 * x[0])) / (1.0 - std::exp(-3.0));
      const double g = x[1];
      const double h = sigmoid(12.0 * (x[3] - 0.5)) * sigmoid(12.0 * (x[4] - 0.5));
      const double mu = f + g + 2.0 * h + eps(rng);
      const int label = static_cast<int>(std::max(std::lround(mu), 0L));
      ds.add_row(qid, label, std::span<const float>(x.data(), num_features));
    }
  }
  return ds;
}

// Labels monotone in feature 1 only; the other features are noise.
inline Dataset single_signal(std::size_t queries, std::size_t docs, std::size_t num_features,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Dataset ds(num_features);
  std::vector<float> x(num_features);
  for (std::size_t q = 0; q < queries; ++q) {
    for (std::size_t d = 0; d < docs; ++d) {
      for (auto& v : x) v = u(rng);
      const int label = std::min(4, static_cast<int>(x[0] * 5.0f));
      ds.add_row(std::to_string(q), label, x);
    }
  }
  return ds;
}

// Brute-force ideal DCG@k by enumerating every ordering.
inline double brute_force_ideal_dcg(std::vector<int> labels, std::size_t k) {
  std::sort(labels.begin(), labels.end());
  double best = 0.0;
  do {
    double dcg = 0.0;
    for (std::size_t r = 0; r < std::min(k, labels.size()); ++r) {
      dcg += (std::pow(2.0, labels[r]) - 1.0) / std::log2(static_cast<double>(r) + 2.0);
    }
    best = std::max(best, dcg);
  } while (std::next_permutation(labels.begin(), labels.end()));
  return best;
}

// NDCG@k computed independently of the metrics module.
inline double reference_ndcg(std::span<const int> labels, std::span<const double> scores,
                             std::size_t k) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Insertion sort: descending score, ties by index.
  for (std::size_t i = 1; i < order.size(); ++i) {
    for (std::size_t j = i; j > 0 && scores[order[j]] > scores[order[j - 1]]; --j) {
      std::swap(order[j], order[j - 1]);
    }
  }
  const double ideal = brute_force_ideal_dcg({labels.begin(), labels.end()}, k);
  if (ideal == 0.0) return 1.0;
  double dcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, order.size()); ++r) {
    dcg += (std::pow(2.0, labels[order[r]]) - 1.0) / std::log2(static_cast<double>(r) + 2.0);
  }
  return dcg / ideal;
}

// Small budgets so unit tests train in well under a second.
inline TrainConfig quick_config() {
  TrainConfig c;
  c.num_leaves = 16;
  c.learning_rate = 0.1;
  c.early_stopping_rounds = 15;
  c.max_rounds_per_stage = 150;
  c.stage2_max_rounds = 300;
  c.max_interactions = 10;
  c.min_data_in_leaf = 10;
  c.max_bins = 64;
  return c;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ilmart_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace ilmart::testing

#endif  // ILMART_TESTS_TEST_UTIL_H_
