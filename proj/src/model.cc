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

#include "ilmart/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "ilmart/error.h"

namespace ilmart {
namespace {

using nlohmann::json;

[[noreturn]] void violation(const std::string& what) {
  throw ModelError("constraint violation: " + what);
}

std::string pair_name(const FeaturePair& p) {
  return "(" + std::to_string(p.first + 1) + "," + std::to_string(p.second + 1) + ")";
}

// Feature ids are 1-based on disk, matching the SVMLight input.
json features_to_json(std::span<const int> features) {
  json out = json::array();
  for (int f : features) out.push_back(f + 1);
  return out;
}

std::vector<int> features_from_json(const json& j) {
  std::vector<int> out;
  for (const auto& v : j) out.push_back(v.get<int>() - 1);
  return out;
}

json pair_to_json(const FeaturePair& p) { return json::array({p.first + 1, p.second + 1}); }

FeaturePair pair_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ModelError("pair must have two features");
  return FeaturePair{j[0].get<int>() - 1, j[1].get<int>() - 1};
}

json tree_to_json(const DecisionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({{"feature", n.feature + 1},
                     {"threshold", n.threshold},
                     {"threshold_bin", n.threshold_bin},
                     {"default_left", n.default_left},
                     {"left", n.left},
                     {"right", n.right}});
  }
  return {{"tag", to_string(tree.tag.kind)},
          {"tag_features", features_to_json(tree.tag.features)},
          {"used_features", features_to_json(tree.used_features)},
          {"nodes", std::move(nodes)},
          {"leaf_values", tree.leaf_values}};
}

DecisionTree tree_from_json(const json& j) {
  DecisionTree tree;
  tree.tag.kind = constraint_kind_from_string(j.at("tag").get<std::string>());
  tree.tag.features = features_from_json(j.at("tag_features"));
  tree.used_features = features_from_json(j.at("used_features"));
  for (const auto& n : j.at("nodes")) {
    DecisionTree::Node node;
    node.feature = n.at("feature").get<int>() - 1;
    node.threshold = n.at("threshold").get<double>();
    node.threshold_bin = n.at("threshold_bin").get<int>();
    node.default_left = n.at("default_left").get<bool>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    tree.nodes.push_back(node);
  }
  tree.leaf_values = j.at("leaf_values").get<std::vector<double>>();
  tree.stump = tree.nodes.empty();
  return tree;
}

void check_tree(const DecisionTree& tree, const IlmartModel& model) {
  try {
    tree.validate_structure(model.num_features);
  } catch (const ModelError& e) {
    violation(e.what());
  }
  const auto& boundaries = model.bins.all_boundaries();
  if (boundaries.empty()) return;
  for (const auto& n : tree.nodes) {
    const auto& b = boundaries[static_cast<std::size_t>(n.feature)];
    if (n.threshold_bin < 0 || static_cast<std::size_t>(n.threshold_bin) >= b.size() ||
        b[static_cast<std::size_t>(n.threshold_bin)] != n.threshold) {
      violation("split threshold does not match the stored bin boundaries");
    }
  }
}

}  // namespace

double IlmartModel::predict(std::span<const float> features) const {
  double score = 0.0;
  for (const auto& t : main_trees) score += t.predict(features);
  for (const auto& t : interaction_trees) score += t.predict(features);
  return score;
}

std::optional<std::size_t> IlmartModel::pair_rank(const FeaturePair& pair) const {
  const auto it = std::find(interaction_pairs.begin(), interaction_pairs.end(), pair);
  if (it == interaction_pairs.end()) return std::nullopt;
  return static_cast<std::size_t>(it - interaction_pairs.begin());
}

IlmartModel IlmartModel::with_top_interactions(std::size_t k) const {
  IlmartModel out = *this;
  std::erase_if(out.interaction_trees, [&](const DecisionTree& t) {
    const auto rank = pair_rank(t.tag.pair());
    return !rank || *rank >= k;
  });
  if (k < out.interaction_pairs.size()) out.interaction_pairs.resize(k);
  return out;
}

void IlmartModel::refresh_effects(std::span<const FeaturePair> ranking) {
  std::set<int> features;
  for (const auto& t : main_trees) features.insert(t.used_features.begin(), t.used_features.end());
  main_features.assign(features.begin(), features.end());

  std::vector<FeaturePair> used;
  for (const auto& t : interaction_trees) {
    const FeaturePair p = t.tag.pair();
    if (std::find(used.begin(), used.end(), p) == used.end()) used.push_back(p);
  }
  interaction_pairs.clear();
  for (const auto& p : ranking) {
    if (std::find(used.begin(), used.end(), p) != used.end() &&
        std::find(interaction_pairs.begin(), interaction_pairs.end(), p) ==
            interaction_pairs.end()) {
      interaction_pairs.push_back(p);
    }
  }
  for (const auto& p : used) {
    if (std::find(interaction_pairs.begin(), interaction_pairs.end(), p) ==
        interaction_pairs.end()) {
      interaction_pairs.push_back(p);
    }
  }
}

void IlmartModel::validate() const {
  const auto& boundaries = bins.all_boundaries();
  if (!boundaries.empty() && boundaries.size() != num_features) {
    violation("bin_info covers " + std::to_string(boundaries.size()) +
              " features, model has " + std::to_string(num_features));
  }

  std::set<int> used_main;
  for (const auto& t : main_trees) {
    check_tree(t, *this);
    if (t.tag.kind != ConstraintKind::kSingle || t.tag.features.size() != 1) {
      violation("main-effect tree not tagged single(j)");
    }
    if (t.used_features != t.tag.features) {
      violation("main-effect tree splits on features other than its own");
    }
    used_main.insert(t.used_features.begin(), t.used_features.end());
  }
  if (!std::equal(used_main.begin(), used_main.end(), main_features.begin(),
                  main_features.end())) {
    violation("J differs from the features used by main-effect trees");
  }

  const std::set<int> j_set(main_features.begin(), main_features.end());
  std::set<FeaturePair> pairs;
  for (const auto& p : interaction_pairs) {
    if (p.first == p.second) violation("pair " + pair_name(p) + " repeats a feature");
    if (p.first > p.second) violation("pair " + pair_name(p) + " not normalized");
    if (!j_set.contains(p.first) || !j_set.contains(p.second)) {
      violation("pair " + pair_name(p) + " outside J x J (heredity)");
    }
    if (!pairs.insert(p).second) violation("duplicate pair " + pair_name(p));
  }
  const std::size_t p_count = main_features.size();
  const std::size_t max_pairs = p_count * (p_count - (p_count > 0 ? 1 : 0)) / 2;
  if (interaction_pairs.size() > max_pairs ||
      interaction_pairs.size() > static_cast<std::size_t>(std::max(config.max_interactions, 0))) {
    violation("too many interaction pairs");
  }

  std::set<FeaturePair> used_pairs;
  for (const auto& t : interaction_trees) {
    check_tree(t, *this);
    if (t.tag.kind != ConstraintKind::kPair || t.tag.features.size() != 2) {
      violation("interaction tree not tagged pair(i,j)");
    }
    const FeaturePair p = t.tag.pair();
    if (!pairs.contains(p)) violation("interaction tree uses unselected pair " + pair_name(p));
    if (t.used_features.empty()) violation("interaction tree without splits");
    for (int f : t.used_features) {
      if (!p.contains(f)) {
        violation("interaction tree splits outside its pair " + pair_name(p));
      }
    }
    used_pairs.insert(p);
  }
  if (used_pairs != pairs) violation("K_set lists a pair no interaction tree uses");
}

std::vector<double> predict_dataset(const IlmartModel& model, const Dataset& ds) {
  if (ds.num_features() > model.num_features) {
    throw Error("dataset has " + std::to_string(ds.num_features()) +
                " features, model expects " + std::to_string(model.num_features));
  }
  std::vector<double> scores(ds.num_rows());
  std::vector<float> row(model.num_features, 0.0f);
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    const auto src = ds.row(i);
    std::copy(src.begin(), src.end(), row.begin());
    scores[i] = model.predict(row);
  }
  return scores;
}

nlohmann::json model_to_json(const IlmartModel& m) {
  json main_trees = json::array();
  for (const auto& t : m.main_trees) main_trees.push_back(tree_to_json(t));
  json interaction_trees = json::array();
  for (const auto& t : m.interaction_trees) interaction_trees.push_back(tree_to_json(t));
  json k_set = json::array();
  for (const auto& p : m.interaction_pairs) k_set.push_back(pair_to_json(p));
  json selected = json::array();
  for (const auto& p : m.log.selected_pairs) selected.push_back(pair_to_json(p));
  json curve = json::array();
  for (const auto& r : m.log.curve) curve.push_back({{"round", r.round}, {"stage", r.stage}, {"valid_ndcg", r.valid_ndcg}});

  return {
      {"version", kModelSchemaVersion},
      {"config", to_json(m.config)},
      {"bin_info",
       {{"num_features", m.num_features},
        {"max_bins", m.config.max_bins},
        {"boundaries", m.bins.all_boundaries()}}},
      {"main_trees", std::move(main_trees)},
      {"interaction_trees", std::move(interaction_trees)},
      {"J", features_to_json(m.main_features)},
      {"K_set", std::move(k_set)},
      {"training_log",
       {{"curve", std::move(curve)},
        {"selected_pairs", std::move(selected)},
        {"discovery_rounds", m.log.discovery_rounds},
        {"main_best_round", m.log.main_best_round},
        {"interaction_best_round", m.log.interaction_best_round},
        {"train_digest", m.log.train_digest},
        {"valid_digest", m.log.valid_digest}}},
  };
}

IlmartModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version")) throw ModelError("model: missing version");
  if (j.at("version") != kModelSchemaVersion) {
    throw ModelError("model: schema version mismatch (found " + j.at("version").dump() +
                     ", expected " + std::to_string(kModelSchemaVersion) + ")");
  }
  IlmartModel m;
  try {
    m.config = train_config_from_json(j.at("config"));
    const auto& bin_info = j.at("bin_info");
    m.num_features = bin_info.at("num_features").get<std::size_t>();
    m.bins = BinMapper(bin_info.at("boundaries").get<std::vector<std::vector<double>>>());
    for (const auto& t : j.at("main_trees")) m.main_trees.push_back(tree_from_json(t));
    for (const auto& t : j.at("interaction_trees")) m.interaction_trees.push_back(tree_from_json(t));
    m.main_features = features_from_json(j.at("J"));
    for (const auto& p : j.at("K_set")) m.interaction_pairs.push_back(pair_from_json(p));
    const auto& log = j.at("training_log");
    for (const auto& r : log.at("curve")) {
      m.log.curve.push_back({r.at("round").get<int>(), r.at("stage").get<int>(),
                             r.at("valid_ndcg").get<double>()});
    }
    for (const auto& p : log.at("selected_pairs")) m.log.selected_pairs.push_back(pair_from_json(p));
    m.log.discovery_rounds = log.at("discovery_rounds").get<int>();
    m.log.main_best_round = log.at("main_best_round").get<int>();
    m.log.interaction_best_round = log.at("interaction_best_round").get<int>();
    m.log.train_digest = log.at("train_digest").get<std::string>();
    m.log.valid_digest = log.at("valid_digest").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("model: malformed file: ") + e.what());
  }
  m.validate();
  return m;
}

void save_model(const IlmartModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model '" + path.string() + "'");
  out << model_to_json(model).dump(1) << '\n';
  if (!out) throw Error("failed writing model '" + path.string() + "'");
}

IlmartModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError("model '" + path.string() + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace ilmart
