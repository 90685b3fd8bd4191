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

#include "ilmart/config.h"

#include <string>

#include "ilmart/error.h"

namespace ilmart {
namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <typename T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  T value{};
  read(j, key, value);
  out = value;
}

}  // namespace

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw ConfigError(message);
  };
  require(num_leaves >= 2, "num_leaves must be >= 2");
  require(learning_rate > 0.0, "learning_rate must be > 0");
  require(early_stopping_rounds >= 1, "early_stopping_rounds must be >= 1");
  require(ndcg_cutoff_for_stopping >= 1, "ndcg_cutoff_for_stopping must be >= 1");
  require(max_interactions >= 0, "max_interactions must be >= 0");
  require(stage2_max_rounds >= 1, "stage2_max_rounds must be >= 1");
  require(max_rounds_per_stage >= 1, "max_rounds_per_stage must be >= 1");
  require(sigma > 0.0, "sigma must be > 0");
  require(truncation >= 1, "truncation must be >= 1");
  require(lambda_l2 >= 0.0, "lambda_l2 must be >= 0");
  require(min_data_in_leaf >= 1, "min_data_in_leaf must be >= 1");
  require(min_sum_hessian_in_leaf >= 0.0, "min_sum_hessian_in_leaf must be >= 0");
  require(min_gain >= 0.0, "min_gain must be >= 0");
  require(max_bins >= 2 && max_bins <= 256, "max_bins must be in [2, 256]");
  require(!interaction_num_leaves || *interaction_num_leaves >= 2,
          "interaction_num_leaves must be >= 2");
  require(!interaction_learning_rate || *interaction_learning_rate > 0.0,
          "interaction_learning_rate must be > 0");
}

nlohmann::json to_json(const TrainConfig& c) {
  nlohmann::json j = {
      {"num_leaves", c.num_leaves},
      {"learning_rate", c.learning_rate},
      {"early_stopping_rounds", c.early_stopping_rounds},
      {"ndcg_cutoff_for_stopping", c.ndcg_cutoff_for_stopping},
      {"max_interactions", c.max_interactions},
      {"stage2_max_rounds", c.stage2_max_rounds},
      {"max_rounds_per_stage", c.max_rounds_per_stage},
      {"sigma", c.sigma},
      {"truncation", c.truncation},
      {"lambda_norm", c.lambda_norm},
      {"lambda_l2", c.lambda_l2},
      {"min_data_in_leaf", c.min_data_in_leaf},
      {"min_sum_hessian_in_leaf", c.min_sum_hessian_in_leaf},
      {"min_gain", c.min_gain},
      {"max_bins", c.max_bins},
      {"rng_seed", c.rng_seed},
  };
  j["interaction_num_leaves"] =
      c.interaction_num_leaves ? nlohmann::json(*c.interaction_num_leaves) : nullptr;
  j["interaction_learning_rate"] =
      c.interaction_learning_rate ? nlohmann::json(*c.interaction_learning_rate)
                                  : nullptr;
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const nlohmann::json known = to_json(TrainConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  read(j, "num_leaves", c.num_leaves);
  read(j, "learning_rate", c.learning_rate);
  read(j, "early_stopping_rounds", c.early_stopping_rounds);
  read(j, "ndcg_cutoff_for_stopping", c.ndcg_cutoff_for_stopping);
  read(j, "max_interactions", c.max_interactions);
  read(j, "stage2_max_rounds", c.stage2_max_rounds);
  read(j, "max_rounds_per_stage", c.max_rounds_per_stage);
  read(j, "sigma", c.sigma);
  read(j, "truncation", c.truncation);
  read(j, "lambda_norm", c.lambda_norm);
  read(j, "lambda_l2", c.lambda_l2);
  read(j, "min_data_in_leaf", c.min_data_in_leaf);
  read(j, "min_sum_hessian_in_leaf", c.min_sum_hessian_in_leaf);
  read(j, "min_gain", c.min_gain);
  read(j, "max_bins", c.max_bins);
  read(j, "rng_seed", c.rng_seed);
  read_optional(j, "interaction_num_leaves", c.interaction_num_leaves);
  read_optional(j, "interaction_learning_rate", c.interaction_learning_rate);
  return c;
}

}  // namespace ilmart
