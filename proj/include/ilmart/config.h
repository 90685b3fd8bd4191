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

#ifndef ILMART_CONFIG_H_
#define ILMART_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <optional>

#include "json.hpp"

namespace ilmart {

// Hyper-parameters and stopping rules for all three training stages.
struct TrainConfig {
  // Tuning grids: num_leaves {32, 64, 128}, learning_rate {0.001, 0.01, 0.1}.
  int num_leaves = 64;
  double learning_rate = 0.1;
  int early_stopping_rounds = 100;
  std::size_t ndcg_cutoff_for_stopping = 10;
  int max_interactions = 50;
  int stage2_max_rounds = 5000;
  int max_rounds_per_stage = 10000;

  double sigma = 1.0;
  std::size_t truncation = 10;
  bool lambda_norm = false;

  double lambda_l2 = 0.0;
  int min_data_in_leaf = 20;
  double min_sum_hessian_in_leaf = 1e-3;
  double min_gain = 0.0;
  int max_bins = 255;

  std::uint64_t rng_seed = 42;

  // Interaction-learning overrides; unset means "same as main effects".
  std::optional<int> interaction_num_leaves;
  std::optional<double> interaction_learning_rate;

  // Throws ConfigError on out-of-range values.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

nlohmann::json to_json(const TrainConfig& config);
// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

}  // namespace ilmart

#endif  // ILMART_CONFIG_H_
