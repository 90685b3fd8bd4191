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

#ifndef ILMART_STATS_H_
#define ILMART_STATS_H_

#include <cstddef>
#include <cstdint>
#include <span>

namespace ilmart {

struct SignificanceResult {
  // mean(a) - mean(b), in metric units.
  double mean_difference = 0.0;
  double p_value = 1.0;
  std::size_t num_permutations = 0;
  bool exhaustive = false;
};

inline constexpr std::size_t kMaxExhaustiveQueries = 20;
inline constexpr std::size_t kDefaultPermutations = 10000;

// Two-sided paired randomization test on per-query metric values.
//
// The statistic is |mean(a) - mean(b)|. With at most 20 queries all 2^n swap
// patterns are enumerated and p is exact; otherwise `num_permutations`
// random patterns give p = (1 + hits) / (1 + num_permutations).
SignificanceResult fisher_randomization(std::span<const double> a,
                                        std::span<const double> b,
                                        std::size_t num_permutations = kDefaultPermutations,
                                        std::uint64_t seed = 42);

}  // namespace ilmart

#endif  // ILMART_STATS_H_
