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

#include "ilmart/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "ilmart/error.h"

namespace ilmart {

double gain(int label) { return std::ldexp(1.0, label) - 1.0; }

double discount(std::size_t rank) {
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

std::vector<std::size_t> rank_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

double dcg_at(std::span<const int> labels, std::span<const double> scores,
              std::size_t k) {
  const auto order = rank_by_score(scores);
  const std::size_t n = std::min(k, order.size());
  double dcg = 0.0;
  for (std::size_t r = 0; r < n; ++r) dcg += gain(labels[order[r]]) * discount(r + 1);
  return dcg;
}

double ideal_dcg_at(std::span<const int> labels, std::size_t k) {
  std::vector<int> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t n = std::min(k, sorted.size());
  double dcg = 0.0;
  for (std::size_t r = 0; r < n; ++r) dcg += gain(sorted[r]) * discount(r + 1);
  return dcg;
}

double ndcg_at(std::span<const int> labels, std::span<const double> scores,
               std::size_t k) {
  if (labels.size() != scores.size()) {
    throw Error("ndcg: labels and scores differ in length");
  }
  if (k < 1) throw Error("ndcg: cutoff must be >= 1");
  const double ideal = ideal_dcg_at(labels, k);
  if (ideal <= 0.0) return 1.0;
  return dcg_at(labels, scores, k) / ideal;
}

NdcgReport mean_ndcg(const Dataset& ds, std::span<const double> scores,
                     std::span<const std::size_t> cutoffs) {
  if (scores.size() != ds.num_rows()) {
    throw Error("ndcg: " + std::to_string(scores.size()) + " scores for " +
                std::to_string(ds.num_rows()) + " rows");
  }
  NdcgReport report;
  report.cutoffs.assign(cutoffs.begin(), cutoffs.end());
  report.per_query.assign(cutoffs.size(), std::vector<double>(ds.num_queries()));
  std::vector<int> labels;
  std::vector<double> query_scores;
  for (std::size_t q = 0; q < ds.num_queries(); ++q) {
    const auto& rows = ds.groups()[q].rows;
    labels.clear();
    query_scores.clear();
    for (std::size_t r : rows) {
      labels.push_back(ds.label(r));
      query_scores.push_back(scores[r]);
    }
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      report.per_query[c][q] = ndcg_at(labels, query_scores, cutoffs[c]);
    }
  }
  for (const auto& values : report.per_query) {
    double sum = 0.0;
    for (double v : values) sum += v;
    report.mean.push_back(values.empty() ? 0.0
                                         : sum / static_cast<double>(values.size()));
  }
  return report;
}

}  // namespace ilmart
