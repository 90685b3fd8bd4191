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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <sstream>

#include "ilmart/error.h"
#include "ilmart/metrics.h"
#include "ilmart/trainer.h"
#include "test_util.h"

using namespace ilmart;

namespace {

struct Planted {
  Dataset train = testing::planted_interaction(80, 30, 21);
  Dataset valid = testing::planted_interaction(30, 30, 22);
  TrainingData data{train, valid, 64};
};

const Planted& planted() {
  static const Planted p;
  return p;
}

const TrainResult& planted_result() {
  static const TrainResult r = train_ilmart(planted().data, testing::quick_config());
  return r;
}

double valid_score(const IlmartModel& m, const Dataset& valid, std::size_t cutoff) {
  const std::size_t cutoffs[] = {cutoff};
  return mean_ndcg(valid, predict_dataset(m, valid), cutoffs).mean[0];
}

double best_of_stage(const TrainingLog& log, int stage) {
  double best = -1;
  for (const auto& r : log.curve) {
    if (r.stage == stage) best = std::max(best, r.valid_ndcg);
  }
  return best;
}

}  // namespace

TEST_CASE("one-feature dataset") {
  const Dataset train = testing::single_signal(30, 20, 1, 1);
  const Dataset valid = testing::single_signal(10, 20, 1, 2);
  TrainingData data(train, valid, 64);
  const auto m = train_main_effects(data, testing::quick_config());
  CHECK(m.main_features == std::vector<int>{0});
  CHECK(m.p() == 1);
  CHECK(!m.main_trees.empty());
  for (const auto& t : m.main_trees) CHECK(t.tag.features == std::vector<int>{0});
  std::ostringstream log;
  const auto sel = select_interactions(m, data, testing::quick_config(), &log);
  CHECK(sel.pairs.empty());
  CHECK(log.str().find("warning") != std::string::npos);
}

TEST_CASE("signal on f1 dominates the main effects") {
  const Dataset train = testing::single_signal(60, 20, 6, 3);
  const Dataset valid = testing::single_signal(20, 20, 6, 4);
  TrainingData data(train, valid, 64);
  const auto m = train_main_effects(data, testing::quick_config());
  m.validate();
  REQUIRE(std::find(m.main_features.begin(), m.main_features.end(), 0) != m.main_features.end());
  std::map<int, double> mass;
  for (const auto& t : m.main_trees) {
    for (double v : t.leaf_values) mass[t.tag.features[0]] += std::abs(v);
  }
  for (const auto& [f, total] : mass) {
    if (f != 0) CHECK(total < mass[0]);
  }
}

TEST_CASE("two main effects give at most one pair") {
  const Dataset train = testing::planted_interaction(40, 20, 5, 2);
  const Dataset valid = testing::planted_interaction(15, 20, 6, 2);
  TrainingData data(train, valid, 64);
  const auto r = train_ilmart(data, testing::quick_config());
  CHECK(r.selected_pairs.size() <= 1);
  for (const auto& p : r.selected_pairs) CHECK(p == FeaturePair{0, 1});
  r.full.validate();
}

TEST_CASE("planted pair is selected early") {
  const auto& r = planted_result();
  const auto& pairs = r.selected_pairs;
  REQUIRE(!pairs.empty());
  const auto it = std::find(pairs.begin(), pairs.end(), FeaturePair{3, 4});
  REQUIRE(it != pairs.end());
  CHECK(it - pairs.begin() < 3);
  CHECK(pairs.size() <= 10);
  for (const auto& p : pairs) {
    CHECK(p.first < p.second);
    CHECK(std::binary_search(r.main_effects.main_features.begin(),
                             r.main_effects.main_features.end(), p.first));
    CHECK(std::binary_search(r.main_effects.main_features.begin(),
                             r.main_effects.main_features.end(), p.second));
  }
  CHECK(r.full.log.selected_pairs == pairs);
}

TEST_CASE("interaction model is sound and not worse on validation") {
  const auto& r = planted_result();
  const auto& full = r.full;
  full.validate();
  CHECK(full.main_trees == r.main_effects.main_trees);
  CHECK(full.k() <= r.selected_pairs.size());
  for (const auto& t : full.interaction_trees) {
    CHECK(t.tag.kind == ConstraintKind::kPair);
    CHECK(std::find(r.selected_pairs.begin(), r.selected_pairs.end(), t.tag.pair()) !=
          r.selected_pairs.end());
  }
  // K_set follows selection order.
  std::size_t last = 0;
  for (const auto& p : full.interaction_pairs) {
    const auto pos = static_cast<std::size_t>(
        std::find(r.selected_pairs.begin(), r.selected_pairs.end(), p) - r.selected_pairs.begin());
    CHECK(pos >= last);
    last = pos;
  }
  const auto& valid = planted().valid;
  CHECK(valid_score(full, valid, 10) >= valid_score(r.main_effects, valid, 10));
}

TEST_CASE("rollback keeps the best validation round") {
  const auto& r = planted_result();
  const auto& valid = planted().valid;
  CHECK(std::abs(valid_score(r.main_effects, valid, 10) - best_of_stage(r.main_effects.log, 1)) <= 1e-12);
  CHECK(std::abs(valid_score(r.full, valid, 10) - best_of_stage(r.full.log, 3)) <= 1e-12);
  CHECK(static_cast<std::size_t>(r.main_effects.log.main_best_round) == r.main_effects.main_trees.size());
  CHECK(static_cast<std::size_t>(r.full.log.interaction_best_round) == r.full.interaction_trees.size());
}

TEST_CASE("stage separation") {
  const auto& r = planted_result();
  const auto stage1 = r.full.with_top_interactions(0);
  const auto& valid = planted().valid;
  CHECK(predict_dataset(stage1, valid) == predict_dataset(r.main_effects, valid));
}

TEST_CASE("discovery trees never reach stage 3") {
  const auto& r = planted_result();
  const auto direct = train_interaction_effects(r.main_effects, r.selected_pairs, planted().data,
                                                testing::quick_config());
  CHECK(direct.interaction_trees == r.full.interaction_trees);
  CHECK(direct.interaction_pairs == r.full.interaction_pairs);
}

TEST_CASE("single allowed pair") {
  const auto& r = planted_result();
  const FeaturePair pair[] = {{0, 1}};
  const auto m = train_interaction_effects(r.main_effects, pair, planted().data, testing::quick_config());
  m.validate();
  for (const auto& t : m.interaction_trees) {
    for (int f : t.used_features) CHECK((f == 0 || f == 1));
  }
  CHECK(m.k() <= 1);
}

TEST_CASE("stage 3 preconditions") {
  const auto& r = planted_result();
  CHECK_THROWS_AS(train_interaction_effects(r.main_effects, {}, planted().data, testing::quick_config()), Error);
  const FeaturePair same[] = {{2, 2}};
  CHECK_THROWS_AS(train_interaction_effects(r.main_effects, same, planted().data, testing::quick_config()), ConfigError);
  const FeaturePair outside[] = {{0, 42}};
  CHECK_THROWS_AS(train_interaction_effects(r.main_effects, outside, planted().data, testing::quick_config()), ConfigError);
}

TEST_CASE("configuration and data errors") {
  auto cfg = testing::quick_config();
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(train_main_effects(planted().data, cfg), ConfigError);
  cfg = testing::quick_config();
  cfg.num_leaves = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  const Dataset empty(10);
  const Dataset& valid = planted().valid;
  TrainingData no_train(empty, valid, 64);
  CHECK_THROWS_AS(train_main_effects(no_train, testing::quick_config()), Error);
  TrainingData no_valid(planted().train, empty, 64);
  CHECK_THROWS_AS(train_main_effects(no_valid, testing::quick_config()), Error);
  const Dataset narrow = testing::planted_interaction(5, 10, 9, 4);
  CHECK_THROWS_AS(TrainingData(planted().train, narrow, 64), Error);
}

TEST_CASE("training is deterministic") {
  const Dataset train = testing::planted_interaction(30, 20, 31);
  const Dataset valid = testing::planted_interaction(10, 20, 32);
  TrainingData data(train, valid, 64);
  const auto a = train_ilmart(data, testing::quick_config()).full;
  const auto b = train_ilmart(data, testing::quick_config()).full;
  CHECK(model_to_json(a).dump() == model_to_json(b).dump());
  CHECK(a.log.train_digest == train.digest());
  CHECK(a.log.valid_digest == valid.digest());
}

TEST_CASE("zero interactions returns the stage-1 model") {
  auto cfg = testing::quick_config();
  cfg.max_interactions = 0;
  const Dataset train = testing::planted_interaction(30, 20, 41);
  const Dataset valid = testing::planted_interaction(10, 20, 42);
  TrainingData data(train, valid, 64);
  const auto r = train_ilmart(data, cfg);
  CHECK(r.selected_pairs.empty());
  CHECK(r.full == r.main_effects);
}

TEST_CASE("accumulate_scores sums binned tree outputs") {
  const auto& r = planted_result();
  const auto& bins = planted().data.valid_bins();
  std::vector<double> scores(planted().valid.num_rows(), 0.0);
  accumulate_scores(r.full.main_trees, bins, scores);
  accumulate_scores(r.full.interaction_trees, bins, scores);
  const auto direct = predict_dataset(r.full, planted().valid);
  for (std::size_t i = 0; i < scores.size(); ++i) CHECK(scores[i] == doctest::Approx(direct[i]).epsilon(1e-12));
}
