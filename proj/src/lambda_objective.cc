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

#include "ilmart/lambda_objective.h"

#include <algorithm>
#include <cmath>

#include "ilmart/error.h"
#include "ilmart/metrics.h"

namespace ilmart {
namespace {

double truncated_discount(std::size_t rank0, std::size_t truncation) {
  return rank0 < truncation ? discount(rank0 + 1) : 0.0;
}

}  // namespace

double swap_delta_ndcg(int label_a, int label_b, std::size_t rank_a,
                       std::size_t rank_b, double inverse_ideal,
                       std::size_t truncation) {
  const double delta_gain = gain(label_a) - gain(label_b);
  const double delta_discount = truncated_discount(rank_a, truncation) -
                                truncated_discount(rank_b, truncation);
  return std::abs(delta_gain * delta_discount) * inverse_ideal;
}

void compute_query_lambdas(std::span<const int> labels,
                           std::span<const double> scores,
                           const LambdaOptions& options,
                           std::span<double> gradient, std::span<double> hessian) {
  const std::size_t n = labels.size();
  std::fill(gradient.begin(), gradient.end(), 0.0);
  std::fill(hessian.begin(), hessian.end(), 0.0);
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error("lambdas: non-finite score");
  }
  const double ideal = ideal_dcg_at(labels, options.truncation);
  if (ideal <= 0.0 || n < 2) return;
  const double inverse_ideal = 1.0 / ideal;
  const double sigma = options.sigma;

  const auto order = rank_by_score(scores);
  // Every pair with at least one member inside the truncation has its
  // better-ranked member at rank a < truncation.
  const std::size_t top = std::min(n, options.truncation);
  double sum_lambdas = 0.0;
  for (std::size_t a = 0; a < top; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      std::size_t hi = order[a];
      std::size_t lo = order[b];
      if (labels[hi] == labels[lo]) continue;
      std::size_t hi_rank = a;
      std::size_t lo_rank = b;
      if (labels[hi] < labels[lo]) {
        std::swap(hi, lo);
        std::swap(hi_rank, lo_rank);
      }
      const double delta = swap_delta_ndcg(labels[hi], labels[lo], hi_rank,
                                           lo_rank, inverse_ideal,
                                           options.truncation);
      const double rho = 1.0 / (1.0 + std::exp(sigma * (scores[hi] - scores[lo])));
      const double lambda = sigma * rho * delta;
      const double h = sigma * sigma * rho * (1.0 - rho) * delta;
      gradient[hi] += lambda;
      gradient[lo] -= lambda;
      hessian[hi] += h;
      hessian[lo] += h;
      sum_lambdas += 2.0 * lambda;
    }
  }
  if (options.normalize && sum_lambdas > 0.0) {
    const double factor = std::log2(1.0 + sum_lambdas) / sum_lambdas;
    for (std::size_t i = 0; i < n; ++i) {
      gradient[i] *= factor;
      hessian[i] *= factor;
    }
  }
}

LambdaGrad compute_lambdas(std::span<const double> scores, const Dataset& ds,
                           const LambdaOptions& options) {
  if (scores.size() != ds.num_rows()) {
    throw Error("lambdas: scores not aligned with dataset rows");
  }
  if (!(options.sigma > 0.0)) throw ConfigError("sigma must be > 0");
  if (options.truncation < 1) throw ConfigError("truncation must be >= 1");

  LambdaGrad out;
  out.sigma = options.sigma;
  out.truncation = options.truncation;
  out.gradient.assign(ds.num_rows(), 0.0);
  out.hessian.assign(ds.num_rows(), 0.0);

  std::vector<int> labels;
  std::vector<double> query_scores, g, h;
  for (const auto& group : ds.groups()) {
    const std::size_t n = group.rows.size();
    labels.resize(n);
    query_scores.resize(n);
    g.resize(n);
    h.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      labels[k] = ds.label(group.rows[k]);
      query_scores[k] = scores[group.rows[k]];
    }
    compute_query_lambdas(labels, query_scores, options, g, h);
    for (std::size_t k = 0; k < n; ++k) {
      out.gradient[group.rows[k]] = g[k];
      out.hessian[group.rows[k]] = h[k];
    }
  }
  return out;
}

}  // namespace ilmart
