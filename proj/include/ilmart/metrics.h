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

#ifndef ILMART_METRICS_H_
#define ILMART_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "ilmart/dataset.h"

namespace ilmart {

// Exponential gain 2^label - 1.
double gain(int label);
// Positional discount 1 / log2(rank + 1), with 1-based rank.
double discount(std::size_t rank);

// Document indices by descending score; ties keep ascending index.
std::vector<std::size_t> rank_by_score(std::span<const double> scores);

double dcg_at(std::span<const int> labels, std::span<const double> scores,
              std::size_t k);
double ideal_dcg_at(std::span<const int> labels, std::size_t k);

// NDCG@k. A query without relevant documents scores 1.0.
double ndcg_at(std::span<const int> labels, std::span<const double> scores,
               std::size_t k);

struct NdcgReport {
  std::vector<std::size_t> cutoffs;
  // per_query[c][q] is NDCG@cutoffs[c] of query q (dataset group order).
  std::vector<std::vector<double>> per_query;
  std::vector<double> mean;

  std::size_t num_queries() const {
    return per_query.empty() ? 0 : per_query.front().size();
  }
};

// Unweighted mean NDCG over the queries of `ds`; `scores` are per row.
NdcgReport mean_ndcg(const Dataset& ds, std::span<const double> scores,
                     std::span<const std::size_t> cutoffs);

}  // namespace ilmart

#endif  // ILMART_METRICS_H_
