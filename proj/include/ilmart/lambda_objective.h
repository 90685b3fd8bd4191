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

#ifndef ILMART_LAMBDA_OBJECTIVE_H_
#define ILMART_LAMBDA_OBJECTIVE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "ilmart/dataset.h"

namespace ilmart {

// LambdaRank first and second order terms, one entry per dataset row.
//
// `gradient` is the lambda itself: positive values push the score up. Trees
// are fit to the loss gradient, which is its negation.
struct LambdaGrad {
  std::vector<double> gradient;
  std::vector<double> hessian;
  double sigma = 1.0;
  std::size_t truncation = 10;
};

struct LambdaOptions {
  double sigma = 1.0;
  std::size_t truncation = 10;
  // Rescale each query's lambdas by log2(1 + S) / S, S the sum of |lambda|.
  bool normalize = false;
};

// |NDCG@truncation change| from swapping the documents at 0-based ranks
// `rank_a` and `rank_b` of a query with the given labels at those ranks.
double swap_delta_ndcg(int label_a, int label_b, std::size_t rank_a,
                       std::size_t rank_b, double inverse_ideal,
                       std::size_t truncation);

LambdaGrad compute_lambdas(std::span<const double> scores, const Dataset& ds,
                           const LambdaOptions& options);

// Single-query form; `labels` and `scores` describe one query.
void compute_query_lambdas(std::span<const int> labels,
                           std::span<const double> scores,
                           const LambdaOptions& options,
                           std::span<double> gradient, std::span<double> hessian);

}  // namespace ilmart

#endif  // ILMART_LAMBDA_OBJECTIVE_H_
