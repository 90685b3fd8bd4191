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

#include "commands.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ilmart/config.h"
#include "ilmart/dataset.h"
#include "ilmart/error.h"
#include "ilmart/interpret.h"
#include "ilmart/metrics.h"
#include "ilmart/model.h"
#include "ilmart/stats.h"
#include "ilmart/trainer.h"
#include "json.hpp"

namespace ilmart::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Usage problems (bad flags, missing inputs) exit with kExitUsage.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing --") + what);
  if (!fs::is_regular_file(path)) {
    throw UsageError(std::string(what) + " file not found: " + path);
  }
}

std::vector<std::size_t> parse_cutoffs(const std::string& text) {
  std::vector<std::size_t> cutoffs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), k);
    if (ec != std::errc() || ptr != item.data() + item.size() || k < 1) {
      throw UsageError("bad cutoff '" + item + "'");
    }
    cutoffs.push_back(k);
  }
  if (cutoffs.empty()) throw UsageError("no cutoffs given");
  return cutoffs;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config file not found: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config '" + path + "': " + e.what());
  }
}

// Dataset for a trained model: feature ids beyond the model's d are rejected.
Dataset load_for_model(const std::string& path, const IlmartModel& model,
                       bool allow_empty = false) {
  LoadOptions options;
  options.num_features = model.num_features;
  options.allow_empty = allow_empty;
  try {
    return load_svmlight(path, options);
  } catch (const ParseError& e) {
    throw Error(std::string("dataset/model mismatch or malformed data: ") + e.what());
  }
}

// Sentinel file that keeps concurrent runs from sharing an output directory.
class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) : path_(dir / ".ilmart.lock") {
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f) throw Error("output directory is locked by another run: " + path_.string());
    std::fclose(f);
  }
  ~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  fs::path path_;
};

struct TrainOptions {
  std::string config_path;
  std::string train_path;
  std::string valid_path;
  std::string out_dir;
  std::optional<int> interactions;
  std::optional<int> num_leaves;
  std::optional<double> learning_rate;
  std::optional<int> early_stopping;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> num_features;
  bool quiet = false;
};

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  // File values first, then flags.
  TrainConfig config;
  std::string train_path, valid_path, out_dir = ".";
  std::optional<std::size_t> num_features;
  if (!opt.config_path.empty()) {
    json file = read_json_file(opt.config_path);
    if (!file.is_object()) throw UsageError("config file must hold a JSON object");
    auto take_string = [&](const char* key, std::string& dst) {
      if (file.contains(key)) {
        dst = file.at(key).get<std::string>();
        file.erase(key);
      }
    };
    take_string("train", train_path);
    take_string("valid", valid_path);
    take_string("out", out_dir);
    if (file.contains("num_features")) {
      num_features = file.at("num_features").get<std::size_t>();
      file.erase("num_features");
    }
    try {
      config = train_config_from_json(file, config);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  if (!opt.train_path.empty()) train_path = opt.train_path;
  if (!opt.valid_path.empty()) valid_path = opt.valid_path;
  if (!opt.out_dir.empty()) out_dir = opt.out_dir;
  if (opt.num_features) num_features = opt.num_features;
  if (opt.interactions) config.max_interactions = *opt.interactions;
  if (opt.num_leaves) config.num_leaves = *opt.num_leaves;
  if (opt.learning_rate) config.learning_rate = *opt.learning_rate;
  if (opt.early_stopping) config.early_stopping_rounds = *opt.early_stopping;
  if (opt.seed) config.rng_seed = *opt.seed;
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  require_file(train_path, "train");
  require_file(valid_path, "valid");

  LoadOptions load;
  load.num_features = num_features;
  Dataset train = load_svmlight(train_path, load);
  Dataset valid = load_svmlight(valid_path, load);
  if (!num_features && train.num_features() != valid.num_features()) {
    load.num_features = std::max(train.num_features(), valid.num_features());
    if (train.num_features() < *load.num_features) train = load_svmlight(train_path, load);
    if (valid.num_features() < *load.num_features) valid = load_svmlight(valid_path, load);
  }

  fs::create_directories(out_dir);
  OutputLock lock(out_dir);

  json run_config = to_json(config);
  run_config["train"] = train_path;
  run_config["valid"] = valid_path;
  run_config["out"] = out_dir;
  run_config["num_features"] = train.num_features();

  TrainingData data(train, valid, config.max_bins);
  const TrainResult result = train_ilmart(data, config, opt.quiet ? nullptr : &err);
  const IlmartModel& model = result.full;

  save_model(model, fs::path(out_dir) / "model.json");
  {
    std::ofstream log(fs::path(out_dir) / "training_log.csv");
    if (!log) throw Error("cannot write training log in " + out_dir);
    log << "# run_config " << run_config.dump() << '\n';
    log << "round,stage,valid_ndcg\n";
    for (const auto& r : model.log.curve) {
      log << r.round << ',' << r.stage << ',' << number(r.valid_ndcg) << '\n';
    }
  }
  {
    std::ofstream rc(fs::path(out_dir) / "run_config.json");
    rc << run_config.dump(1) << '\n';
  }
  out << "trees=" << model.main_trees.size() + model.interaction_trees.size()
      << " main_trees=" << model.main_trees.size()
      << " interaction_trees=" << model.interaction_trees.size() << " p=" << model.p()
      << " K=" << model.k() << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& model_path, const std::string& test_path,
             const std::string& cutoffs_text, std::ostream& out) {
  require_file(model_path, "model");
  require_file(test_path, "test");
  const auto cutoffs = parse_cutoffs(cutoffs_text);
  const IlmartModel model = load_model(model_path);
  const Dataset test = load_for_model(test_path, model);
  const auto report = mean_ndcg(test, predict_dataset(model, test), cutoffs);
  out << "# p=" << model.p() << " K=" << model.k() << '\n';
  out << "cutoff,mean_ndcg,num_queries\n";
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    out << cutoffs[c] << ',' << number(report.mean[c]) << ',' << report.num_queries() << '\n';
  }
  return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& test_path,
                const std::string& out_path, std::ostream& out) {
  require_file(model_path, "model");
  require_file(test_path, "test");
  const IlmartModel model = load_model(model_path);
  const Dataset test = load_for_model(test_path, model, /*allow_empty=*/true);
  const auto scores = predict_dataset(model, test);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw Error("cannot write scores to " + out_path);
  }
  std::ostream& dst = out_path.empty() ? out : file;
  dst << "row_index,qid,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    dst << i << ',' << test.qid(i) << ',' << number(scores[i]) << '\n';
  }
  return kExitOk;
}

int cmd_export(const std::string& model_path, const std::string& test_path,
               const std::string& out_dir, const std::string& format,
               std::optional<std::size_t> top, std::ostream& out) {
  require_file(model_path, "model");
  require_file(test_path, "test");
  if (out_dir.empty()) throw UsageError("missing --out");
  ExportFormat fmt;
  try {
    fmt = export_format_from_string(format);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const IlmartModel model = load_model(model_path);
  const Dataset reference = load_for_model(test_path, model);
  const Effects effects = distill_shapes(model);
  const auto importance = effect_importance(effects, reference);
  const auto written = export_shapes(effects, importance, out_dir, fmt, top);
  out << "exported " << written.size() - 1 << " effects to " << out_dir << '\n';
  return kExitOk;
}

int cmd_compare(const std::vector<std::string>& model_paths, const std::string& test_path,
                const std::string& cutoffs_text, std::size_t permutations,
                std::uint64_t seed, std::ostream& out) {
  if (model_paths.size() != 2) throw UsageError("compare needs exactly two --model files");
  for (const auto& m : model_paths) require_file(m, "model");
  require_file(test_path, "test");
  const auto cutoffs = parse_cutoffs(cutoffs_text);
  const IlmartModel a = load_model(model_paths[0]);
  const IlmartModel b = load_model(model_paths[1]);
  const IlmartModel& wider = a.num_features >= b.num_features ? a : b;
  const Dataset test = load_for_model(test_path, wider);
  const auto report_a = mean_ndcg(test, predict_dataset(a, test), cutoffs);
  const auto report_b = mean_ndcg(test, predict_dataset(b, test), cutoffs);

  out << "# a=" << model_paths[0] << " b=" << model_paths[1] << " queries="
      << test.num_queries() << " permutations=" << permutations << " seed=" << seed << '\n';
  out << "cutoff,ndcg_a,ndcg_b,mean_difference,p_value,significant\n";
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    const auto sig = fisher_randomization(report_a.per_query[c], report_b.per_query[c],
                                          permutations, seed);
    out << cutoffs[c] << ',' << number(report_a.mean[c]) << ',' << number(report_b.mean[c])
        << ',' << number(sig.mean_difference) << ',' << number(sig.p_value) << ','
        << (sig.p_value < 0.05 ? "*" : "") << '\n';
  }
  return kExitOk;
}

int cmd_sweep(const std::string& model_path, const std::string& test_path,
              std::size_t step, const std::string& cutoffs_text, std::ostream& out) {
  require_file(model_path, "model");
  require_file(test_path, "test");
  if (step < 1) throw UsageError("--step must be >= 1");
  const auto cutoffs = parse_cutoffs(cutoffs_text);
  const IlmartModel model = load_model(model_path);
  const Dataset test = load_for_model(test_path, model);

  out << "num_interactions";
  for (auto k : cutoffs) out << ",ndcg@" << k;
  out << '\n';
  std::vector<std::size_t> ks;
  for (std::size_t k = 0; k < model.k(); k += step) ks.push_back(k);
  ks.push_back(model.k());
  for (std::size_t k : ks) {
    const IlmartModel partial = model.with_top_interactions(k);
    const auto report = mean_ndcg(test, predict_dataset(partial, test), cutoffs);
    out << k;
    for (double m : report.mean) out << ',' << number(m);
    out << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interpretable LambdaMART: additive ranking models with pairwise interactions",
               "ilmart"};
  app.require_subcommand(1);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a model (main effects, then interactions)");
  train_cmd->add_option("--config", train.config_path, "JSON run configuration");
  train_cmd->add_option("--train", train.train_path, "Training split (SVMLight)");
  train_cmd->add_option("--valid", train.valid_path, "Validation split (SVMLight)");
  train_cmd->add_option("--out", train.out_dir, "Output directory");
  train_cmd->add_option("--interactions", train.interactions, "Max interaction pairs; 0 = main effects only");
  train_cmd->add_option("--num-leaves", train.num_leaves, "Leaves per tree");
  train_cmd->add_option("--learning-rate", train.learning_rate, "Shrinkage");
  train_cmd->add_option("--early-stopping", train.early_stopping, "Rounds without improvement before stopping");
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--num-features", train.num_features, "Force the feature count d");
  train_cmd->add_flag("--quiet", train.quiet, "No progress output");

  std::string model_path, test_path, out_path, cutoffs = "1,5,10", format = "csv";
  std::vector<std::string> model_paths;
  std::optional<std::size_t> top;
  std::size_t step = 1;
  std::size_t permutations = kDefaultPermutations;
  std::uint64_t seed = 42;

  auto* eval_cmd = app.add_subcommand("eval", "Mean NDCG of a model on a dataset");
  eval_cmd->add_option("--model", model_path)->required();
  eval_cmd->add_option("--test", test_path)->required();
  eval_cmd->add_option("--cutoffs", cutoffs, "Comma-separated cutoffs");

  auto* predict_cmd = app.add_subcommand("predict", "Score every row of a dataset");
  predict_cmd->add_option("--model", model_path)->required();
  predict_cmd->add_option("--test", test_path)->required();
  predict_cmd->add_option("--out", out_path, "Scores file (default stdout)");

  auto* export_cmd = app.add_subcommand("export-shapes", "Export main-effect curves and interaction surfaces");
  export_cmd->add_option("--model", model_path)->required();
  export_cmd->add_option("--test", test_path, "Reference dataset for importance")->required();
  export_cmd->add_option("--out", out_path, "Output directory")->required();
  export_cmd->add_option("--format", format, "csv or json");
  export_cmd->add_option("--top", top, "Export only the N most important effects");

  auto* compare_cmd = app.add_subcommand("compare", "Compare two models with a randomization test");
  compare_cmd->add_option("--model", model_paths, "Two model files")->required()->expected(2);
  compare_cmd->add_option("--test", test_path)->required();
  compare_cmd->add_option("--cutoffs", cutoffs);
  compare_cmd->add_option("--permutations", permutations);
  compare_cmd->add_option("--seed", seed);

  auto* sweep_cmd = app.add_subcommand("sweep-interactions", "NDCG with the top-k interaction effects enabled");
  sweep_cmd->add_option("--model", model_path)->required();
  sweep_cmd->add_option("--test", test_path)->required();
  sweep_cmd->add_option("--step", step);
  sweep_cmd->add_option("--cutoffs", cutoffs);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train, out, err);
    if (*eval_cmd) return cmd_eval(model_path, test_path, cutoffs, out);
    if (*predict_cmd) return cmd_predict(model_path, test_path, out_path, out);
    if (*export_cmd) return cmd_export(model_path, test_path, out_path, format, top, out);
    if (*compare_cmd) {
      return cmd_compare(model_paths, test_path, cutoffs, permutations, seed, out);
    }
    if (*sweep_cmd) return cmd_sweep(model_path, test_path, step, cutoffs, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ilmart::cli
