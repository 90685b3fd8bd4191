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

#include "ilmart/trainer.h"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>

#include "ilmart/error.h"
#include "ilmart/lambda_objective.h"
#include "ilmart/metrics.h"
#include "ilmart/tree_learner.h"

namespace ilmart {
namespace {

// Strict improvement margin for early stopping.
constexpr double kMinImprovement = 1e-7;

SplitOptions split_options(const TrainConfig& c, int num_leaves) {
  SplitOptions s;
  s.leaf_budget = num_leaves;
  s.min_data_in_leaf = c.min_data_in_leaf;
  s.min_gain = c.min_gain;
  s.lambda_l2 = c.lambda_l2;
  s.min_sum_hessian_in_leaf = c.min_sum_hessian_in_leaf;
  return s;
}

LambdaOptions lambda_options(const TrainConfig& c) {
  return LambdaOptions{c.sigma, c.truncation, c.lambda_norm};
}

double valid_ndcg(const TrainingData& data, std::span<const double> scores,
                  std::size_t cutoff) {
  const std::size_t cutoffs[] = {cutoff};
  return mean_ndcg(data.valid(), scores, cutoffs).mean[0];
}

void add_tree(const DecisionTree& tree, const BinnedMatrix& bins,
              std::span<double> scores) {
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] += tree.predict_binned(bins, i);
}

// Loss gradients (negated lambdas) and hessians for the current scores.
void loss_derivatives(const TrainingData& data, std::span<const double> scores,
                      const LambdaOptions& options, std::vector<double>& gradient,
                      std::vector<double>& hessian) {
  LambdaGrad lambdas = compute_lambdas(scores, data.train(), options);
  gradient = std::move(lambdas.gradient);
  for (double& g : gradient) g = -g;
  hessian = std::move(lambdas.hessian);
}

struct BoostOutcome {
  std::vector<DecisionTree> trees;
  int best_round = 0;
  std::vector<TrainingRecord> curve;
};

// Boosting with early stopping, starting from the given scores. Round 0 is
// the starting ensemble; the result keeps the trees up to the best round.
BoostOutcome boost_with_early_stopping(const TrainingData& data,
                                       const TrainConfig& config,
                                       const ConstraintRegime& regime,
                                       double learning_rate, int stage,
                                       std::vector<double> train_scores,
                                       std::vector<double> valid_scores,
                                       std::ostream* progress) {
  BoostOutcome out;
  const LambdaOptions lambdas = lambda_options(config);
  double best = valid_ndcg(data, valid_scores, config.ndcg_cutoff_for_stopping);
  out.curve.push_back({0, stage, best});
  std::vector<double> gradient, hessian;

  for (int round = 1; round <= config.max_rounds_per_stage; ++round) {
    loss_derivatives(data, train_scores, lambdas, gradient, hessian);
    DecisionTree tree =
        fit_tree(data.mapper(), data.train_bins(), gradient, hessian, regime, learning_rate);
    if (tree.stump) {
      if (progress) *progress << "stage " << stage << ": no admissible split at round " << round << '\n';
      break;
    }
    add_tree(tree, data.train_bins(), train_scores);
    add_tree(tree, data.valid_bins(), valid_scores);
    out.trees.push_back(std::move(tree));

    const double ndcg = valid_ndcg(data, valid_scores, config.ndcg_cutoff_for_stopping);
    out.curve.push_back({round, stage, ndcg});
    if (ndcg > best + kMinImprovement) {
      best = ndcg;
      out.best_round = round;
    }
    if (progress && round % 100 == 0) {
      *progress << "stage " << stage << " round " << round << " valid ndcg@"
                << config.ndcg_cutoff_for_stopping << "=" << ndcg << " best=" << best
                << " @" << out.best_round << '\n';
    }
    if (round - out.best_round >= config.early_stopping_rounds) break;
  }
  out.trees.resize(static_cast<std::size_t>(out.best_round));
  return out;
}

void check_inputs(const TrainingData& data) {
  if (data.train().empty()) throw Error("training set is empty");
  if (data.valid().empty()) throw Error("validation set is empty");
}

}  // namespace

TrainingData::TrainingData(const Dataset& train, const Dataset& valid, int max_bins)
    : train_(&train), valid_(&valid), mapper_(build_bins(train, max_bins)) {
  if (train.num_features() != valid.num_features()) {
    throw Error("train has " + std::to_string(train.num_features()) +
                " features, valid has " + std::to_string(valid.num_features()));
  }
  train_bins_ = mapper_.apply(train);
  valid_bins_ = mapper_.apply(valid);
}

void accumulate_scores(std::span<const DecisionTree> trees, const BinnedMatrix& bins,
                       std::span<double> scores) {
  for (const auto& t : trees) add_tree(t, bins, scores);
}

IlmartModel train_main_effects(const TrainingData& data, const TrainConfig& config,
                               std::ostream* progress) {
  config.validate();
  check_inputs(data);
  std::vector<int> all(data.train().num_features());
  std::iota(all.begin(), all.end(), 0);
  const auto regime =
      ConstraintRegime::single(all, split_options(config, config.num_leaves));

  BoostOutcome outcome = boost_with_early_stopping(
      data, config, regime, config.learning_rate, 1,
      std::vector<double>(data.train().num_rows(), 0.0),
      std::vector<double>(data.valid().num_rows(), 0.0), progress);

  IlmartModel model;
  model.num_features = data.train().num_features();
  model.main_trees = std::move(outcome.trees);
  model.config = config;
  model.bins = data.mapper();
  model.log.curve = std::move(outcome.curve);
  model.log.main_best_round = outcome.best_round;
  model.log.train_digest = data.train().digest();
  model.log.valid_digest = data.valid().digest();
  model.refresh_effects();
  model.validate();
  if (progress) {
    *progress << "stage 1: kept " << model.main_trees.size() << " trees, p=" << model.p() << '\n';
  }
  return model;
}

SelectionResult select_interactions(const IlmartModel& main_effects,
                                    const TrainingData& data, const TrainConfig& config,
                                    std::ostream* progress) {
  config.validate();
  check_inputs(data);
  SelectionResult result;
  const std::size_t p = main_effects.p();
  if (p < 2) {
    if (progress) *progress << "warning: p=" << p << " main effects, no pairs to select\n";
    return result;
  }
  const std::size_t target =
      std::min(static_cast<std::size_t>(config.max_interactions), p * (p - 1) / 2);
  if (target == 0) return result;

  const auto regime = ConstraintRegime::discovery(main_effects.main_features,
                                                  split_options(config, 3));
  const LambdaOptions lambdas = lambda_options(config);

  // Continue from the main-effect scores on a private copy.
  std::vector<double> train_scores(data.train().num_rows(), 0.0);
  std::vector<double> valid_scores(data.valid().num_rows(), 0.0);
  accumulate_scores(main_effects.main_trees, data.train_bins(), train_scores);
  accumulate_scores(main_effects.main_trees, data.valid_bins(), valid_scores);

  std::vector<double> gradient, hessian;
  while (result.pairs.size() < target && result.rounds < config.stage2_max_rounds) {
    loss_derivatives(data, train_scores, lambdas, gradient, hessian);
    DecisionTree tree = fit_tree(data.mapper(), data.train_bins(), gradient, hessian, regime,
                                 config.learning_rate);
    if (tree.stump) break;
    ++result.rounds;
    add_tree(tree, data.train_bins(), train_scores);
    add_tree(tree, data.valid_bins(), valid_scores);
    result.curve.push_back(
        {result.rounds, 2, valid_ndcg(data, valid_scores, config.ndcg_cutoff_for_stopping)});
    if (tree.used_features.size() == 2) {
      const auto pair = FeaturePair::of(tree.used_features[0], tree.used_features[1]);
      if (std::find(result.pairs.begin(), result.pairs.end(), pair) == result.pairs.end()) {
        result.pairs.push_back(pair);
      }
    }
  }
  if (progress) {
    *progress << "stage 2: " << result.pairs.size() << " pairs after " << result.rounds
              << " discovery trees\n";
  }
  return result;
}

IlmartModel train_interaction_effects(const IlmartModel& main_effects,
                                      std::span<const FeaturePair> pairs,
                                      const TrainingData& data, const TrainConfig& config,
                                      std::ostream* progress) {
  config.validate();
  check_inputs(data);
  if (pairs.empty()) throw Error("interaction learning needs at least one pair");
  const std::set<int> j_set(main_effects.main_features.begin(), main_effects.main_features.end());
  for (const auto& p : pairs) {
    if (!j_set.contains(p.first) || !j_set.contains(p.second) || p.first == p.second) {
      throw ConfigError("interaction pairs must be distinct features of J");
    }
  }

  // Restart from the main-effect scores; discovery trees never contribute.
  std::vector<double> train_scores(data.train().num_rows(), 0.0);
  std::vector<double> valid_scores(data.valid().num_rows(), 0.0);
  accumulate_scores(main_effects.main_trees, data.train_bins(), train_scores);
  accumulate_scores(main_effects.main_trees, data.valid_bins(), valid_scores);

  const int leaves = config.interaction_num_leaves.value_or(config.num_leaves);
  const double lr = config.interaction_learning_rate.value_or(config.learning_rate);
  const auto regime = ConstraintRegime::pairs(pairs, split_options(config, leaves));
  BoostOutcome outcome = boost_with_early_stopping(data, config, regime, lr, 3,
                                                   std::move(train_scores),
                                                   std::move(valid_scores), progress);

  IlmartModel model = main_effects;
  model.config = config;
  model.interaction_trees = std::move(outcome.trees);
  model.log.interaction_best_round = outcome.best_round;
  model.log.curve.insert(model.log.curve.end(), outcome.curve.begin(), outcome.curve.end());
  model.refresh_effects(pairs);
  model.validate();
  if (progress) {
    *progress << "stage 3: kept " << model.interaction_trees.size() << " trees, K=" << model.k()
              << '\n';
  }
  return model;
}

TrainResult train_ilmart(const TrainingData& data, const TrainConfig& config,
                         std::ostream* progress) {
  TrainResult result;
  result.main_effects = train_main_effects(data, config, progress);
  result.full = result.main_effects;
  if (config.max_interactions == 0) return result;

  SelectionResult selection = select_interactions(result.main_effects, data, config, progress);
  result.selected_pairs = selection.pairs;
  result.full.log.selected_pairs = selection.pairs;
  result.full.log.discovery_rounds = selection.rounds;
  if (selection.pairs.empty()) return result;

  IlmartModel main_with_log = result.main_effects;
  main_with_log.log.selected_pairs = selection.pairs;
  main_with_log.log.discovery_rounds = selection.rounds;
  main_with_log.log.curve.insert(main_with_log.log.curve.end(), selection.curve.begin(),
                                 selection.curve.end());
  result.full =
      train_interaction_effects(main_with_log, selection.pairs, data, config, progress);
  return result;
}

}  // namespace ilmart
