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

#include "ilmart/tree_learner.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ilmart/error.h"

namespace ilmart {
namespace {

struct HistBin {
  double g = 0.0;
  double h = 0.0;
  std::size_t count = 0;
};

struct Split {
  bool valid = false;
  int feature = -1;
  int bin = -1;
  double gain = 0.0;
};

struct Leaf {
  std::vector<std::size_t> rows;
  double sum_g = 0.0;
  double sum_h = 0.0;
  std::vector<HistBin> hist;
  Split best;
  int parent = -1;
  bool is_left = true;
};

double leaf_score(double g, double h, double lambda_l2) {
  const double denom = h + lambda_l2;
  return denom > 0.0 ? g * g / denom : 0.0;
}

double newton_value(double g, double h, double lambda_l2, double lr) {
  const double denom = h + lambda_l2;
  return denom > 0.0 ? -g / denom * lr : 0.0;
}

class Grower {
 public:
  Grower(const BinMapper& mapper, const BinnedMatrix& bins,
         std::span<const double> gradient, std::span<const double> hessian,
         const ConstraintRegime& regime)
      : mapper_(mapper),
        bins_(bins),
        gradient_(gradient),
        hessian_(hessian),
        regime_(regime),
        offsets_(mapper.num_features() + 1, 0) {
    for (std::size_t j = 0; j < mapper.num_features(); ++j) {
      offsets_[j + 1] = offsets_[j] + static_cast<std::size_t>(mapper.num_bins(j));
    }
  }

  DecisionTree grow(double learning_rate) {
    const int budget = regime_.effective_leaf_budget();
    candidates_ = regime_.candidates(used_);

    Leaf root;
    root.rows.resize(bins_.num_rows);
    for (std::size_t i = 0; i < root.rows.size(); ++i) root.rows[i] = i;
    sum_rows(root);
    root.hist.assign(offsets_.back(), HistBin{});
    build_hist(root);
    find_best(root);
    leaves_.push_back(std::move(root));

    DecisionTree tree;
    tree.tag.kind = regime_.kind;
    while (static_cast<int>(leaves_.size()) < budget) {
      int pick = -1;
      for (std::size_t l = 0; l < leaves_.size(); ++l) {
        if (!leaves_[l].best.valid) continue;
        if (pick < 0 || leaves_[l].best.gain > leaves_[static_cast<std::size_t>(pick)].best.gain) {
          pick = static_cast<int>(l);
        }
      }
      if (pick < 0) break;
      split_leaf(static_cast<std::size_t>(pick), tree);
    }

    tree.leaf_values.clear();
    for (const Leaf& leaf : leaves_) {
      tree.leaf_values.push_back(
          newton_value(leaf.sum_g, leaf.sum_h, regime_.split.lambda_l2, learning_rate));
    }
    tree.used_features = used_;
    tree.stump = tree.nodes.empty();
    assign_tag(tree);
    return tree;
  }

 private:
  void sum_rows(Leaf& leaf) const {
    leaf.sum_g = 0.0;
    leaf.sum_h = 0.0;
    for (std::size_t r : leaf.rows) {
      leaf.sum_g += gradient_[r];
      leaf.sum_h += hessian_[r];
    }
  }

  void build_hist(Leaf& leaf) const {
    for (int f : candidates_) {
      const auto j = static_cast<std::size_t>(f);
      HistBin* hist = leaf.hist.data() + offsets_[j];
      std::fill(hist, hist + (offsets_[j + 1] - offsets_[j]), HistBin{});
      const auto& column = bins_.columns[j];
      for (std::size_t r : leaf.rows) {
        HistBin& b = hist[column[r]];
        b.g += gradient_[r];
        b.h += hessian_[r];
        ++b.count;
      }
    }
  }

  void subtract_hist(const Leaf& parent, const Leaf& sibling, Leaf& out) const {
    for (int f : candidates_) {
      const auto j = static_cast<std::size_t>(f);
      for (std::size_t k = offsets_[j]; k < offsets_[j + 1]; ++k) {
        out.hist[k].g = parent.hist[k].g - sibling.hist[k].g;
        out.hist[k].h = parent.hist[k].h - sibling.hist[k].h;
        out.hist[k].count = parent.hist[k].count - sibling.hist[k].count;
      }
    }
  }

  void find_best(Leaf& leaf) const {
    const SplitOptions& opt = regime_.split;
    const auto min_count = static_cast<std::size_t>(std::max(opt.min_data_in_leaf, 1));
    leaf.best = Split{};
    if (leaf.rows.size() < 2 * min_count) return;
    const double parent_score = leaf_score(leaf.sum_g, leaf.sum_h, opt.lambda_l2);
    for (int f : candidates_) {
      const auto j = static_cast<std::size_t>(f);
      const int nb = mapper_.num_bins(j);
      const HistBin* hist = leaf.hist.data() + offsets_[j];
      double left_g = 0.0, left_h = 0.0;
      std::size_t left_count = 0;
      for (int b = 0; b + 1 < nb; ++b) {
        left_g += hist[b].g;
        left_h += hist[b].h;
        left_count += hist[b].count;
        const std::size_t right_count = leaf.rows.size() - left_count;
        if (left_count < min_count) continue;
        if (right_count < min_count) break;
        const double right_g = leaf.sum_g - left_g;
        const double right_h = leaf.sum_h - left_h;
        if (left_h < opt.min_sum_hessian_in_leaf ||
            right_h < opt.min_sum_hessian_in_leaf) {
          continue;
        }
        const double gain = leaf_score(left_g, left_h, opt.lambda_l2) +
                            leaf_score(right_g, right_h, opt.lambda_l2) -
                            parent_score;
        if (!(gain > opt.min_gain)) continue;
        if (!leaf.best.valid || gain > leaf.best.gain) {
          leaf.best = Split{true, f, b, gain};
        }
      }
    }
  }

  void split_leaf(std::size_t index, DecisionTree& tree) {
    const Split split = leaves_[index].best;
    const auto feature = static_cast<std::size_t>(split.feature);

    const int node_index = static_cast<int>(tree.nodes.size());
    DecisionTree::Node node;
    node.feature = split.feature;
    node.threshold_bin = split.bin;
    node.threshold = mapper_.threshold(feature, split.bin);
    node.left = ~static_cast<int>(index);
    node.right = ~static_cast<int>(leaves_.size());
    tree.nodes.push_back(node);
    if (leaves_[index].parent >= 0) {
      auto& parent = tree.nodes[static_cast<std::size_t>(leaves_[index].parent)];
      (leaves_[index].is_left ? parent.left : parent.right) = node_index;
    }

    Leaf parent = std::move(leaves_[index]);
    Leaf left, right;
    const auto& column = bins_.columns[feature];
    for (std::size_t r : parent.rows) {
      (column[r] <= split.bin ? left.rows : right.rows).push_back(r);
    }
    sum_rows(left);
    sum_rows(right);
    left.parent = right.parent = node_index;
    left.is_left = true;
    right.is_left = false;

    const auto before = candidates_;
    if (!std::binary_search(used_.begin(), used_.end(), split.feature)) {
      used_.insert(std::upper_bound(used_.begin(), used_.end(), split.feature),
                   split.feature);
      candidates_ = regime_.candidates(used_);
    }

    left.hist.assign(offsets_.back(), HistBin{});
    right.hist.assign(offsets_.back(), HistBin{});
    Leaf& small = left.rows.size() <= right.rows.size() ? left : right;
    Leaf& large = &small == &left ? right : left;
    build_hist(small);
    subtract_hist(parent, small, large);
    find_best(left);
    find_best(right);

    leaves_[index] = std::move(left);
    leaves_.push_back(std::move(right));
    if (candidates_ != before) {
      // Pending splits at other leaves may use features no longer allowed.
      for (std::size_t l = 0; l + 1 < leaves_.size(); ++l) {
        if (l != index) find_best(leaves_[l]);
      }
    }
  }

  void assign_tag(DecisionTree& tree) const {
    if (tree.stump || regime_.kind == ConstraintKind::kDiscovery) return;
    for (const auto& set : regime_.allowed_sets) {
      if (std::includes(set.begin(), set.end(), used_.begin(), used_.end())) {
        tree.tag.features = set;
        return;
      }
    }
    throw Error("tree learner: grown tree matches no allowed feature set");
  }

  const BinMapper& mapper_;
  const BinnedMatrix& bins_;
  std::span<const double> gradient_;
  std::span<const double> hessian_;
  const ConstraintRegime& regime_;
  std::vector<std::size_t> offsets_;
  std::vector<Leaf> leaves_;
  std::vector<int> used_;
  std::vector<int> candidates_;
};

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

ConstraintRegime ConstraintRegime::single(std::span<const int> features,
                                          const SplitOptions& split) {
  ConstraintRegime r;
  r.kind = ConstraintKind::kSingle;
  r.split = split;
  for (int f : sorted_unique({features.begin(), features.end()})) {
    r.allowed_sets.push_back({f});
  }
  return r;
}

ConstraintRegime ConstraintRegime::pairs(std::span<const FeaturePair> pairs,
                                         const SplitOptions& split) {
  ConstraintRegime r;
  r.kind = ConstraintKind::kPair;
  r.split = split;
  for (const auto& p : pairs) {
    if (p.first == p.second) throw ConfigError("interaction pair needs distinct features");
    r.allowed_sets.push_back({std::min(p.first, p.second), std::max(p.first, p.second)});
  }
  return r;
}

ConstraintRegime ConstraintRegime::discovery(std::span<const int> features,
                                             const SplitOptions& split) {
  ConstraintRegime r;
  r.kind = ConstraintKind::kDiscovery;
  r.split = split;
  const auto f = sorted_unique({features.begin(), features.end()});
  for (std::size_t a = 0; a < f.size(); ++a) {
    for (std::size_t b = a + 1; b < f.size(); ++b) r.allowed_sets.push_back({f[a], f[b]});
  }
  return r;
}

int ConstraintRegime::effective_leaf_budget() const {
  return kind == ConstraintKind::kDiscovery ? std::min(split.leaf_budget, 3)
                                            : split.leaf_budget;
}

std::vector<int> ConstraintRegime::candidates(std::span<const int> used) const {
  std::vector<int> out;
  for (const auto& set : allowed_sets) {
    if (std::includes(set.begin(), set.end(), used.begin(), used.end())) {
      out.insert(out.end(), set.begin(), set.end());
    }
  }
  out = sorted_unique(std::move(out));
  if (kind == ConstraintKind::kDiscovery) {
    std::erase_if(out, [&](int f) {
      return std::find(used.begin(), used.end(), f) != used.end();
    });
  }
  return out;
}

double split_gain(double left_g, double left_h, double right_g, double right_h,
                  double lambda_l2) {
  return leaf_score(left_g, left_h, lambda_l2) + leaf_score(right_g, right_h, lambda_l2) -
         leaf_score(left_g + right_g, left_h + right_h, lambda_l2);
}

DecisionTree fit_tree(const BinMapper& mapper, const BinnedMatrix& bins,
                      std::span<const double> gradient,
                      std::span<const double> hessian,
                      const ConstraintRegime& regime, double learning_rate) {
  if (gradient.size() != bins.num_rows || hessian.size() != bins.num_rows) {
    throw Error("tree learner: gradients not aligned with rows");
  }
  if (regime.split.leaf_budget < 2) throw ConfigError("leaf budget must be >= 2");
  if (bins.columns.size() != mapper.num_features()) {
    throw Error("tree learner: bin matrix does not match mapper");
  }
  Grower grower(mapper, bins, gradient, hessian, regime);
  return grower.grow(learning_rate);
}

}  // namespace ilmart
