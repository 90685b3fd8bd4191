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

#include "ilmart/stats.h"

#include <cmath>
#include <random>
#include <vector>

#include "ilmart/error.h"

namespace ilmart {

SignificanceResult fisher_randomization(std::span<const double> a,
                                        std::span<const double> b,
                                        std::size_t num_permutations,
                                        std::uint64_t seed) {
  if (a.size() != b.size()) throw Error("fisher: paired samples differ in length");
  if (a.empty()) throw Error("fisher: no queries");
  const std::size_t n = a.size();

  std::vector<double> diff(n);
  double sum = 0.0, sum_abs = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    diff[q] = a[q] - b[q];
    sum += diff[q];
    sum_abs += std::abs(diff[q]);
  }
  // Sums of the same terms in another sign pattern may differ by rounding.
  const double observed = std::abs(sum);
  const double tolerance = 1e-12 * sum_abs;

  SignificanceResult result;
  result.mean_difference = sum / static_cast<double>(n);

  if (n <= kMaxExhaustiveQueries) {
    const std::uint64_t patterns = std::uint64_t{1} << n;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      double s = 0.0;
      for (std::size_t q = 0; q < n; ++q) {
        s += (mask >> q) & 1u ? -diff[q] : diff[q];
      }
      if (std::abs(s) >= observed - tolerance) ++hits;
    }
    result.exhaustive = true;
    result.num_permutations = static_cast<std::size_t>(patterns);
    result.p_value = static_cast<double>(hits) / static_cast<double>(patterns);
    return result;
  }

  if (num_permutations == 0) throw Error("fisher: need at least one permutation");
  std::mt19937_64 rng(seed);
  std::uint64_t hits = 0;
  for (std::size_t perm = 0; perm < num_permutations; ++perm) {
    double s = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (q % 64 == 0) bits = rng();
      s += (bits >> (q % 64)) & 1u ? -diff[q] : diff[q];
    }
    if (std::abs(s) >= observed - tolerance) ++hits;
  }
  result.num_permutations = num_permutations;
  result.p_value =
      static_cast<double>(hits + 1) / static_cast<double>(num_permutations + 1);
  return result;
}

}  // namespace ilmart
