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

#include "ilmart/interpret.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "ilmart/error.h"
#include "json.hpp"

namespace ilmart {
namespace {

using nlohmann::json;

std::size_t interval_of(const std::vector<double>& breakpoints, double x) {
  return static_cast<std::size_t>(
      std::lower_bound(breakpoints.begin(), breakpoints.end(), x) - breakpoints.begin());
}

// Index of a threshold known to be in `breakpoints`.
std::size_t position_of(const std::vector<double>& breakpoints, double t) {
  return interval_of(breakpoints, t);
}

std::vector<double> thresholds_of(std::span<const DecisionTree* const> trees, int feature) {
  std::vector<double> out;
  for (const DecisionTree* t : trees) {
    for (const auto& n : t->nodes) {
      if (n.feature == feature) out.push_back(n.threshold);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string feature_label(int f) { return "f" + std::to_string(f + 1); }

// Chain of splits over `breakpoints` whose leaves are the intervals in order.
// Appends nodes to `tree`; `leaf_for(k)` yields the child reference for
// interval k. Returns the reference to the chain's top.
template <typename LeafFor>
int build_chain(DecisionTree& tree, int feature, const std::vector<double>& breakpoints,
                LeafFor&& leaf_for) {
  if (breakpoints.empty()) return leaf_for(std::size_t{0});
  int top = -1;
  int previous = -1;
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    DecisionTree::Node node;
    node.feature = feature;
    node.threshold = breakpoints[k];
    node.threshold_bin = static_cast<int>(k);
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);
    // leaf_for may append nodes itself.
    const int child = leaf_for(k);
    tree.nodes[static_cast<std::size_t>(index)].left = child;
    if (previous >= 0) {
      tree.nodes[static_cast<std::size_t>(previous)].right = index;
    } else {
      top = index;
    }
    previous = index;
  }
  tree.nodes[static_cast<std::size_t>(previous)].right = leaf_for(breakpoints.size());
  return top;
}

}  // namespace

std::size_t ShapeFunction::interval(double x) const { return interval_of(breakpoints, x); }

double InteractionSurface::lookup(double x_first, double x_second) const {
  return at(interval_of(breakpoints_first, x_first), interval_of(breakpoints_second, x_second));
}

double Effects::contribution(std::size_t index, std::span<const float> x) const {
  if (index < shapes.size()) {
    const auto& s = shapes[index];
    return s.lookup(x[static_cast<std::size_t>(s.feature)]);
  }
  const auto& s = surfaces[index - shapes.size()];
  return s.lookup(x[static_cast<std::size_t>(s.pair.first)],
                  x[static_cast<std::size_t>(s.pair.second)]);
}

std::string Effects::name(std::size_t index) const {
  if (index < shapes.size()) return feature_label(shapes[index].feature);
  const auto& p = surfaces[index - shapes.size()].pair;
  return feature_label(p.first) + "_" + feature_label(p.second);
}

double Effects::predict(std::span<const float> x) const {
  double score = 0.0;
  for (std::size_t e = 0; e < size(); ++e) score += contribution(e, x);
  return score;
}

Effects distill_shapes(const IlmartModel& model) {
  Effects effects;
  for (int j : model.main_features) {
    std::vector<const DecisionTree*> trees;
    for (const auto& t : model.main_trees) {
      if (t.tag.features == std::vector<int>{j}) trees.push_back(&t);
    }
    ShapeFunction shape;
    shape.feature = j;
    shape.breakpoints = thresholds_of(trees, j);
    shape.values.assign(shape.breakpoints.size() + 1, 0.0);
    for (std::size_t k = 0; k < shape.values.size(); ++k) {
      for (const DecisionTree* t : trees) {
        shape.values[k] += t->route([&](const DecisionTree::Node& n) {
          return k <= position_of(shape.breakpoints, n.threshold);
        });
      }
    }
    effects.shapes.push_back(std::move(shape));
  }

  for (const auto& pair : model.interaction_pairs) {
    std::vector<const DecisionTree*> trees;
    for (const auto& t : model.interaction_trees) {
      if (t.tag.pair() == pair) trees.push_back(&t);
    }
    InteractionSurface surface;
    surface.pair = pair;
    surface.breakpoints_first = thresholds_of(trees, pair.first);
    surface.breakpoints_second = thresholds_of(trees, pair.second);
    const std::size_t rows = surface.breakpoints_first.size() + 1;
    const std::size_t cols = surface.columns();
    surface.values.assign(rows * cols, 0.0);
    for (std::size_t a = 0; a < rows; ++a) {
      for (std::size_t b = 0; b < cols; ++b) {
        double& cell = surface.values[a * cols + b];
        for (const DecisionTree* t : trees) {
          cell += t->route([&](const DecisionTree::Node& n) {
            return n.feature == pair.first
                       ? a <= position_of(surface.breakpoints_first, n.threshold)
                       : b <= position_of(surface.breakpoints_second, n.threshold);
          });
        }
      }
    }
    effects.surfaces.push_back(std::move(surface));
  }
  return effects;
}

IlmartModel model_from_effects(const Effects& effects, std::size_t num_features) {
  IlmartModel model;
  model.num_features = num_features;
  for (const auto& shape : effects.shapes) {
    DecisionTree tree;
    tree.tag = {ConstraintKind::kSingle, {shape.feature}};
    tree.leaf_values.clear();
    build_chain(tree, shape.feature, shape.breakpoints, [&](std::size_t k) {
      tree.leaf_values.push_back(shape.values[k]);
      return ~static_cast<int>(tree.leaf_values.size() - 1);
    });
    if (!tree.nodes.empty()) tree.used_features = {shape.feature};
    tree.stump = tree.nodes.empty();
    model.main_trees.push_back(std::move(tree));
  }
  for (const auto& surface : effects.surfaces) {
    DecisionTree tree;
    tree.tag = {ConstraintKind::kPair, {surface.pair.first, surface.pair.second}};
    tree.leaf_values.clear();
    build_chain(tree, surface.pair.first, surface.breakpoints_first, [&](std::size_t a) {
      return build_chain(tree, surface.pair.second, surface.breakpoints_second,
                         [&](std::size_t b) {
                           tree.leaf_values.push_back(surface.at(a, b));
                           return ~static_cast<int>(tree.leaf_values.size() - 1);
                         });
    });
    if (!surface.breakpoints_first.empty()) tree.used_features.push_back(surface.pair.first);
    if (!surface.breakpoints_second.empty()) tree.used_features.push_back(surface.pair.second);
    tree.stump = tree.nodes.empty();
    model.interaction_trees.push_back(std::move(tree));
  }
  std::vector<FeaturePair> ranking;
  for (const auto& s : effects.surfaces) ranking.push_back(s.pair);
  model.refresh_effects(ranking);
  return model;
}

std::vector<std::size_t> EffectImportance::ranked() const {
  std::vector<std::size_t> order(effects.size());
  for (const auto& e : effects) order[e.rank - 1] = e.index;
  return order;
}

EffectImportance effect_importance(const Effects& effects, const Dataset& reference) {
  if (reference.empty()) throw Error("importance: reference dataset is empty");
  EffectImportance out;
  std::vector<float> row;
  for (std::size_t e = 0; e < effects.size(); ++e) {
    double sum = 0.0;
    for (std::size_t i = 0; i < reference.num_rows(); ++i) {
      sum += std::abs(effects.contribution(e, reference.row(i)));
    }
    out.effects.push_back(
        {e, effects.name(e), sum / static_cast<double>(reference.num_rows()), 0});
  }
  std::vector<std::size_t> order(out.effects.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.effects[a].importance > out.effects[b].importance;
  });
  for (std::size_t r = 0; r < order.size(); ++r) out.effects[order[r]].rank = r + 1;
  return out;
}

EffectImportance effect_importance(const IlmartModel& model, const Dataset& reference) {
  if (reference.num_features() > model.num_features) {
    throw Error("importance: reference has more features than the model");
  }
  return effect_importance(distill_shapes(model), reference);
}

ExportFormat export_format_from_string(const std::string& name) {
  if (name == "csv") return ExportFormat::kCsv;
  if (name == "json") return ExportFormat::kJson;
  throw ConfigError("unknown export format '" + name + "' (expected csv or json)");
}

std::vector<std::filesystem::path> export_shapes(const Effects& effects,
                                                 const EffectImportance& importance,
                                                 const std::filesystem::path& dir,
                                                 ExportFormat format,
                                                 std::optional<std::size_t> top) {
  if (importance.effects.size() != effects.size()) {
    throw Error("export: importance does not match effects");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("export: cannot create '" + dir.string() + "': " + ec.message());

  const bool csv = format == ExportFormat::kCsv;
  const std::string ext = csv ? ".csv" : ".json";
  auto open = [](const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("export: cannot write '" + path.string() + "'");
    return out;
  };

  std::vector<std::filesystem::path> written;
  std::vector<std::size_t> ranked = importance.ranked();
  if (top && *top < ranked.size()) ranked.resize(*top);

  json index = json::array();
  std::string index_csv = "rank,effect,type,features,importance,file\n";
  for (std::size_t e : ranked) {
    const bool is_main = e < effects.shapes.size();
    const std::string file = (is_main ? "main_" : "pair_") + effects.name(e) + ext;
    const auto path = dir / file;
    auto out = open(path);
    std::string features;
    if (is_main) {
      const auto& s = effects.shapes[e];
      features = std::to_string(s.feature + 1);
      if (csv) {
        out << "upper_bound,value\n";
        for (std::size_t k = 0; k < s.values.size(); ++k) {
          const double upper = k < s.breakpoints.size()
                                   ? s.breakpoints[k]
                                   : std::numeric_limits<double>::infinity();
          out << number(upper) << ',' << number(s.values[k]) << '\n';
        }
      } else {
        out << json{{"feature", s.feature + 1},
                    {"breakpoints", s.breakpoints},
                    {"values", s.values}}
                   .dump(1)
            << '\n';
      }
    } else {
      const auto& s = effects.surfaces[e - effects.shapes.size()];
      features = std::to_string(s.pair.first + 1) + " " + std::to_string(s.pair.second + 1);
      const std::size_t rows = s.breakpoints_first.size() + 1;
      if (csv) {
        out << "upper_first,upper_second,value\n";
        for (std::size_t a = 0; a < rows; ++a) {
          for (std::size_t b = 0; b < s.columns(); ++b) {
            const double ua = a < s.breakpoints_first.size()
                                  ? s.breakpoints_first[a]
                                  : std::numeric_limits<double>::infinity();
            const double ub = b < s.breakpoints_second.size()
                                  ? s.breakpoints_second[b]
                                  : std::numeric_limits<double>::infinity();
            out << number(ua) << ',' << number(ub) << ',' << number(s.at(a, b)) << '\n';
          }
        }
      } else {
        json grid = json::array();
        for (std::size_t a = 0; a < rows; ++a) {
          grid.push_back(std::vector<double>(
              s.values.begin() + static_cast<std::ptrdiff_t>(a * s.columns()),
              s.values.begin() + static_cast<std::ptrdiff_t>((a + 1) * s.columns())));
        }
        out << json{{"features", {s.pair.first + 1, s.pair.second + 1}},
                    {"breakpoints_first", s.breakpoints_first},
                    {"breakpoints_second", s.breakpoints_second},
                    {"values", std::move(grid)}}
                   .dump(1)
            << '\n';
      }
    }
    if (!out) throw Error("export: failed writing '" + path.string() + "'");
    written.push_back(path);

    const auto& score = importance.effects[e];
    index.push_back({{"rank", score.rank},
                     {"effect", score.name},
                     {"type", is_main ? "main" : "interaction"},
                     {"importance", score.importance},
                     {"file", file}});
    index_csv += std::to_string(score.rank) + ',' + score.name + ',' +
                 (is_main ? "main" : "interaction") + ',' + features + ',' +
                 number(score.importance) + ',' + file + '\n';
  }

  const auto index_path = dir / ("index" + ext);
  auto out = open(index_path);
  if (csv) {
    out << index_csv;
  } else {
    out << index.dump(1) << '\n';
  }
  if (!out) throw Error("export: failed writing '" + index_path.string() + "'");
  written.push_back(index_path);
  return written;
}

Effects import_shapes(const std::filesystem::path& dir) {
  auto read = [](const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("import: cannot open '" + path.string() + "'");
    try {
      return json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error("import: '" + path.string() + "': " + e.what());
    }
  };
  Effects effects;
  for (const auto& entry : read(dir / "index.json")) {
    const json j = read(dir / entry.at("file").get<std::string>());
    if (entry.at("type") == "main") {
      ShapeFunction s;
      s.feature = j.at("feature").get<int>() - 1;
      s.breakpoints = j.at("breakpoints").get<std::vector<double>>();
      s.values = j.at("values").get<std::vector<double>>();
      effects.shapes.push_back(std::move(s));
    } else {
      InteractionSurface s;
      s.pair = FeaturePair{j.at("features")[0].get<int>() - 1, j.at("features")[1].get<int>() - 1};
      s.breakpoints_first = j.at("breakpoints_first").get<std::vector<double>>();
      s.breakpoints_second = j.at("breakpoints_second").get<std::vector<double>>();
      for (const auto& row : j.at("values")) {
        for (const auto& v : row) s.values.push_back(v.get<double>());
      }
      effects.surfaces.push_back(std::move(s));
    }
  }
  return effects;
}

}  // namespace ilmart
