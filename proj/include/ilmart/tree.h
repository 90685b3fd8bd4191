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

#ifndef ILMART_TREE_H_
#define ILMART_TREE_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ilmart/dataset.h"

namespace ilmart {

// Unordered pair of distinct features, stored with first < second.
struct FeaturePair {
  int first = 0;
  int second = 0;

  static FeaturePair of(int a, int b) {
    return a < b ? FeaturePair{a, b} : FeaturePair{b, a};
  }
  bool contains(int f) const { return f == first || f == second; }
  friend bool operator==(const FeaturePair&, const FeaturePair&) = default;
  friend auto operator<=>(const FeaturePair&, const FeaturePair&) = default;
};

enum class ConstraintKind { kSingle, kPair, kDiscovery };

std::string to_string(ConstraintKind kind);
ConstraintKind constraint_kind_from_string(const std::string& name);

// The constraint a tree was grown under. `features` holds {j} for single,
// {i, j} for pair and is empty for discovery.
struct ConstraintTag {
  ConstraintKind kind = ConstraintKind::kSingle;
  std::vector<int> features;

  FeaturePair pair() const { return FeaturePair::of(features[0], features[1]); }
  friend bool operator==(const ConstraintTag&, const ConstraintTag&) = default;
};

// Binary regression tree over binned features.
//
// Child references >= 0 index `nodes`; negative values encode leaf ~child.
// A tree without nodes is a single leaf.
struct DecisionTree {
  struct Node {
    int feature = 0;
    int threshold_bin = 0;
    double threshold = 0.0;
    bool default_left = true;
    int left = -1;
    int right = -1;
    friend bool operator==(const Node&, const Node&) = default;
  };

  std::vector<Node> nodes;
  std::vector<double> leaf_values{0.0};
  // Distinct split features, ascending.
  std::vector<int> used_features;
  ConstraintTag tag;
  bool stump = false;

  std::size_t num_leaves() const { return leaf_values.size(); }

  // Routes by `x[feature] <= threshold`.
  double predict(std::span<const float> features) const;
  // Routes by `bin <= threshold_bin`; equals predict() on the raw row when
  // the matrix was built by the mapper the tree was trained with.
  double predict_binned(const BinnedMatrix& bins, std::size_t row) const;

  // Walks the tree with a caller-provided split decision.
  template <typename GoesLeft>
  double route(GoesLeft&& goes_left) const {
    if (nodes.empty()) return leaf_values[0];
    int node = 0;
    while (node >= 0) {
      const Node& n = nodes[static_cast<std::size_t>(node)];
      node = goes_left(n) ? n.left : n.right;
    }
    return leaf_values[static_cast<std::size_t>(~node)];
  }

  // Checks child indices, leaf reachability, finiteness and that
  // used_features matches the split features.
  void validate_structure(std::size_t num_features) const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

}  // namespace ilmart

#endif  // ILMART_TREE_H_
