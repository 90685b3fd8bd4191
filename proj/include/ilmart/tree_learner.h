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

#ifndef ILMART_TREE_LEARNER_H_
#define ILMART_TREE_LEARNER_H_

#include <cstddef>
#include <span>
#include <vector>

#include "ilmart/dataset.h"
#include "ilmart/tree.h"

namespace ilmart {

struct SplitOptions {
  int leaf_budget = 64;
  int min_data_in_leaf = 20;
  double min_gain = 0.0;
  double lambda_l2 = 0.0;
  double min_sum_hessian_in_leaf = 1e-3;
};

// Which features a tree may split on.
//
// A tree may only use features from one allowed set. At every point during
// growth the candidate features are the union of the allowed sets that
// contain all features used so far, so the first split locks the tree into
// the sets sharing that feature.
struct ConstraintRegime {
  ConstraintKind kind = ConstraintKind::kSingle;
  std::vector<std::vector<int>> allowed_sets;
  SplitOptions split;

  // One set {j} per listed feature.
  static ConstraintRegime single(std::span<const int> features,
                                 const SplitOptions& split);
  static ConstraintRegime pairs(std::span<const FeaturePair> pairs,
                                const SplitOptions& split);
  // Three-leaf trees whose two splits use distinct features of `features`.
  static ConstraintRegime discovery(std::span<const int> features,
                                    const SplitOptions& split);

  int effective_leaf_budget() const;
  // Sorted candidate features given the features already used by a tree.
  std::vector<int> candidates(std::span<const int> used) const;
};

// Histogram-based leaf-wise tree growth.
//
// `gradient` and `hessian` are loss derivatives per row; leaf values are the
// Newton step -G / (H + lambda_l2) scaled by `learning_rate`. Returns a
// single-leaf tree with `stump` set when no admissible root split exists.
DecisionTree fit_tree(const BinMapper& mapper, const BinnedMatrix& bins,
                      std::span<const double> gradient,
                      std::span<const double> hessian,
                      const ConstraintRegime& regime, double learning_rate);

// Split gain G_L^2/(H_L+l2) + G_R^2/(H_R+l2) - G^2/(H+l2).
double split_gain(double left_g, double left_h, double right_g, double right_h,
                  double lambda_l2);

}  // namespace ilmart

#endif  // ILMART_TREE_LEARNER_H_
