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

#ifndef ILMART_MODEL_H_
#define ILMART_MODEL_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ilmart/config.h"
#include "ilmart/dataset.h"
#include "ilmart/tree.h"
#include "json.hpp"

namespace ilmart {

inline constexpr int kModelSchemaVersion = 1;

struct TrainingRecord {
  int round = 0;
  int stage = 1;
  double valid_ndcg = 0.0;
  friend bool operator==(const TrainingRecord&, const TrainingRecord&) = default;
};

struct TrainingLog {
  // Round 0 of stages 1 and 3 is the score before any tree of that stage.
  std::vector<TrainingRecord> curve;
  // Every pair nominated by discovery trees, in first-appearance order.
  std::vector<FeaturePair> selected_pairs;
  int discovery_rounds = 0;
  int main_best_round = 0;
  int interaction_best_round = 0;
  std::string train_digest;
  std::string valid_digest;
  friend bool operator==(const TrainingLog&, const TrainingLog&) = default;
};

// Additive ranking model: main-effect trees over single features plus
// interaction trees each confined to one feature pair. No intercept.
struct IlmartModel {
  std::size_t num_features = 0;
  std::vector<DecisionTree> main_trees;
  std::vector<DecisionTree> interaction_trees;
  // Features used by main_trees, ascending.
  std::vector<int> main_features;
  // Pairs used by interaction_trees, in importance (selection) order.
  std::vector<FeaturePair> interaction_pairs;
  TrainConfig config;
  BinMapper bins;
  TrainingLog log;

  std::size_t p() const { return main_features.size(); }
  std::size_t k() const { return interaction_pairs.size(); }

  double predict(std::span<const float> features) const;

  // 0-based position of `pair` in interaction_pairs, if present.
  std::optional<std::size_t> pair_rank(const FeaturePair& pair) const;

  // Same model keeping only interaction trees of the `k` top-ranked pairs.
  IlmartModel with_top_interactions(std::size_t k) const;

  // Recomputes main_features and interaction_pairs from the trees; pairs keep
  // the order given by `ranking`, then first appearance.
  void refresh_effects(std::span<const FeaturePair> ranking = {});

  // Throws ModelError("constraint violation: ...") when an invariant fails.
  void validate() const;

  friend bool operator==(const IlmartModel&, const IlmartModel&) = default;
};

std::vector<double> predict_dataset(const IlmartModel& model, const Dataset& ds);

nlohmann::json model_to_json(const IlmartModel& model);
IlmartModel model_from_json(const nlohmann::json& j);

void save_model(const IlmartModel& model, const std::filesystem::path& path);
IlmartModel load_model(const std::filesystem::path& path);

}  // namespace ilmart

#endif  // ILMART_MODEL_H_
