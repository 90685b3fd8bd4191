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

#ifndef ILMART_TRAINER_H_
#define ILMART_TRAINER_H_

#include <iosfwd>
#include <span>
#include <vector>

#include "ilmart/config.h"
#include "ilmart/dataset.h"
#include "ilmart/model.h"

namespace ilmart {

// Train/validation splits binned with the mapper fit on the training split.
class TrainingData {
 public:
  TrainingData(const Dataset& train, const Dataset& valid, int max_bins);

  const Dataset& train() const { return *train_; }
  const Dataset& valid() const { return *valid_; }
  const BinMapper& mapper() const { return mapper_; }
  const BinnedMatrix& train_bins() const { return train_bins_; }
  const BinnedMatrix& valid_bins() const { return valid_bins_; }

 private:
  const Dataset* train_;
  const Dataset* valid_;
  BinMapper mapper_;
  BinnedMatrix train_bins_;
  BinnedMatrix valid_bins_;
};

// Stage 1: boosting where every tree splits on a single feature. Early
// stopping on validation NDCG rolls the ensemble back to its best round.
IlmartModel train_main_effects(const TrainingData& data, const TrainConfig& config,
                               std::ostream* progress = nullptr);

struct SelectionResult {
  std::vector<FeaturePair> pairs;
  int rounds = 0;
  std::vector<TrainingRecord> curve;
};

// Stage 2: continues boosting from the main-effect scores with three-leaf
// trees over two distinct features of J and returns the pairs they use, in
// first-appearance order. The trees themselves are discarded.
SelectionResult select_interactions(const IlmartModel& main_effects,
                                    const TrainingData& data,
                                    const TrainConfig& config,
                                    std::ostream* progress = nullptr);

// Stage 3: adds trees restricted to the given pairs on top of the
// main-effect model, with the same early stopping as stage 1.
IlmartModel train_interaction_effects(const IlmartModel& main_effects,
                                      std::span<const FeaturePair> pairs,
                                      const TrainingData& data,
                                      const TrainConfig& config,
                                      std::ostream* progress = nullptr);

struct TrainResult {
  IlmartModel main_effects;
  std::vector<FeaturePair> selected_pairs;
  // Equals main_effects when config.max_interactions is 0 or p < 2.
  IlmartModel full;
};

TrainResult train_ilmart(const TrainingData& data, const TrainConfig& config,
                         std::ostream* progress = nullptr);

// Sum of tree outputs per row, added tree by tree in order.
void accumulate_scores(std::span<const DecisionTree> trees, const BinnedMatrix& bins,
                       std::span<double> scores);

}  // namespace ilmart

#endif  // ILMART_TRAINER_H_
