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

#ifndef ILMART_INTERPRET_H_
#define ILMART_INTERPRET_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ilmart/dataset.h"
#include "ilmart/model.h"
#include "ilmart/tree.h"

namespace ilmart {

// Piecewise-constant curve of one main effect. Interval k is
// (breakpoints[k-1], breakpoints[k]], with -inf / +inf at the ends, matching
// the trees' `x <= threshold` routing.
struct ShapeFunction {
  int feature = 0;
  std::vector<double> breakpoints;
  std::vector<double> values;

  std::size_t interval(double x) const;
  double lookup(double x) const { return values[interval(x)]; }
  friend bool operator==(const ShapeFunction&, const ShapeFunction&) = default;
};

// Dense grid of one interaction effect; values are row-major over
// (interval of pair.first, interval of pair.second).
struct InteractionSurface {
  FeaturePair pair;
  std::vector<double> breakpoints_first;
  std::vector<double> breakpoints_second;
  std::vector<double> values;

  std::size_t columns() const { return breakpoints_second.size() + 1; }
  double at(std::size_t a, std::size_t b) const { return values[a * columns() + b]; }
  double lookup(double x_first, double x_second) const;
  friend bool operator==(const InteractionSurface&, const InteractionSurface&) = default;
};

struct Effects {
  std::vector<ShapeFunction> shapes;
  std::vector<InteractionSurface> surfaces;

  std::size_t size() const { return shapes.size() + surfaces.size(); }
  // Contribution of effect `index` (shapes first, then surfaces).
  double contribution(std::size_t index, std::span<const float> x) const;
  std::string name(std::size_t index) const;
  double predict(std::span<const float> x) const;
  friend bool operator==(const Effects&, const Effects&) = default;
};

// Aggregates the trees sharing a feature (or pair) into exact lookup tables.
Effects distill_shapes(const IlmartModel& model);

// Rebuilds an ensemble with one tree per effect whose leaves are the table
// cells; distilling it reproduces `effects`.
IlmartModel model_from_effects(const Effects& effects, std::size_t num_features);

struct EffectScore {
  std::size_t index = 0;
  std::string name;
  double importance = 0.0;
  std::size_t rank = 0;  // 1 = most important
};

struct EffectImportance {
  // In effect-index order.
  std::vector<EffectScore> effects;

  // Effect indices by rank.
  std::vector<std::size_t> ranked() const;
};

// Mean |contribution| of each effect over the rows of `reference`; ties keep
// the lower effect index first.
EffectImportance effect_importance(const Effects& effects, const Dataset& reference);
EffectImportance effect_importance(const IlmartModel& model, const Dataset& reference);

enum class ExportFormat { kCsv, kJson };

ExportFormat export_format_from_string(const std::string& name);

// Writes one file per exported effect plus `index.csv` / `index.json`.
// Returns the paths written, index last.
std::vector<std::filesystem::path> export_shapes(
    const Effects& effects, const EffectImportance& importance,
    const std::filesystem::path& dir, ExportFormat format,
    std::optional<std::size_t> top = std::nullopt);

// Reads a JSON export back.
Effects import_shapes(const std::filesystem::path& dir);

}  // namespace ilmart

#endif  // ILMART_INTERPRET_H_
