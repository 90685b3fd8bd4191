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

#include "ilmart/tree.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "ilmart/error.h"

namespace ilmart {

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kSingle:
      return "single";
    case ConstraintKind::kPair:
      return "pair";
    case ConstraintKind::kDiscovery:
      return "discovery";
  }
  return "unknown";
}

ConstraintKind constraint_kind_from_string(const std::string& name) {
  if (name == "single") return ConstraintKind::kSingle;
  if (name == "pair") return ConstraintKind::kPair;
  if (name == "discovery") return ConstraintKind::kDiscovery;
  throw ModelError("unknown constraint tag '" + name + "'");
}

double DecisionTree::predict(std::span<const float> features) const {
  return route([&](const Node& n) {
    return static_cast<double>(features[static_cast<std::size_t>(n.feature)]) <=
           n.threshold;
  });
}

double DecisionTree::predict_binned(const BinnedMatrix& bins,
                                    std::size_t row) const {
  return route([&](const Node& n) {
    return bins.bin(row, static_cast<std::size_t>(n.feature)) <= n.threshold_bin;
  });
}

void DecisionTree::validate_structure(std::size_t num_features) const {
  if (leaf_values.size() != nodes.size() + 1) {
    throw ModelError("tree: expected " + std::to_string(nodes.size() + 1) +
                     " leaves, found " + std::to_string(leaf_values.size()));
  }
  for (double v : leaf_values) {
    if (!std::isfinite(v)) throw ModelError("tree: non-finite leaf value");
  }
  std::vector<int> node_refs(nodes.size(), 0);
  std::vector<int> leaf_refs(leaf_values.size(), 0);
  std::set<int> features;
  auto visit = [&](int child) {
    if (child >= 0) {
      if (static_cast<std::size_t>(child) >= nodes.size() || child == 0) {
        throw ModelError("tree: bad child index");
      }
      ++node_refs[static_cast<std::size_t>(child)];
    } else {
      const auto leaf = static_cast<std::size_t>(~child);
      if (leaf >= leaf_values.size()) throw ModelError("tree: bad leaf index");
      ++leaf_refs[leaf];
    }
  };
  for (const Node& n : nodes) {
    if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= num_features) {
      throw ModelError("tree: split feature out of range");
    }
    if (!std::isfinite(n.threshold)) throw ModelError("tree: non-finite threshold");
    features.insert(n.feature);
    visit(n.left);
    visit(n.right);
  }
  for (std::size_t i = 1; i < node_refs.size(); ++i) {
    if (node_refs[i] != 1) throw ModelError("tree: node not reached exactly once");
  }
  for (int refs : leaf_refs) {
    if (!nodes.empty() && refs != 1) {
      throw ModelError("tree: leaf not reached exactly once");
    }
  }
  if (!nodes.empty()) {
    std::vector<bool> seen(nodes.size(), false);
    std::vector<int> stack{0};
    std::size_t reached = 0;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node < 0) continue;
      if (seen[static_cast<std::size_t>(node)]) throw ModelError("tree: cycle");
      seen[static_cast<std::size_t>(node)] = true;
      ++reached;
      stack.push_back(nodes[static_cast<std::size_t>(node)].left);
      stack.push_back(nodes[static_cast<std::size_t>(node)].right);
    }
    if (reached != nodes.size()) throw ModelError("tree: unreachable nodes");
  }
  if (!std::equal(features.begin(), features.end(), used_features.begin(),
                  used_features.end())) {
    throw ModelError("tree: used_features does not match split features");
  }
}

}  // namespace ilmart
