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

#include "ilmart/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <utility>

#include "ilmart/error.h"

namespace ilmart {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
         c == '\f';
}

// Splits `line` into whitespace-separated tokens, stopping at '#'.
std::vector<std::string_view> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

std::string shortest(float value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace

Dataset Dataset::from_dense(std::size_t num_features, std::vector<float> features,
                            std::span<const int> labels,
                            std::span<const std::string> qids) {
  if (labels.size() != qids.size() ||
      features.size() != labels.size() * num_features) {
    throw Error("dataset: inconsistent matrix dimensions");
  }
  Dataset ds(num_features);
  ds.features_ = std::move(features);
  ds.labels_.reserve(labels.size());
  ds.row_group_.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] > kMaxLabel) {
      throw Error("dataset: label out of range [0, 31]");
    }
    ds.labels_.push_back(labels[i]);
    auto [it, inserted] = ds.group_index_.try_emplace(qids[i], ds.groups_.size());
    if (inserted) ds.groups_.push_back({qids[i], {}});
    ds.groups_[it->second].rows.push_back(i);
    ds.row_group_.push_back(it->second);
  }
  return ds;
}

void Dataset::add_row(std::string_view qid, int label,
                      std::span<const float> features) {
  if (features.size() != num_features_) {
    throw Error("dataset: row has " + std::to_string(features.size()) +
                " features, expected " + std::to_string(num_features_));
  }
  if (label < 0 || label > kMaxLabel) {
    throw Error("dataset: label out of range [0, 31]");
  }
  const std::size_t row = labels_.size();
  features_.insert(features_.end(), features.begin(), features.end());
  labels_.push_back(label);
  auto [it, inserted] =
      group_index_.try_emplace(std::string(qid), groups_.size());
  if (inserted) groups_.push_back({std::string(qid), {}});
  groups_[it->second].rows.push_back(row);
  row_group_.push_back(it->second);
}

int Dataset::max_label() const {
  return labels_.empty() ? 0 : *std::max_element(labels_.begin(), labels_.end());
}

std::string Dataset::digest() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  const std::uint64_t d = num_features_;
  mix(&d, sizeof(d));
  for (std::size_t i = 0; i < num_rows(); ++i) {
    const std::string& q = qid(i);
    mix(q.data(), q.size());
    mix(&labels_[i], sizeof(int));
    mix(features_.data() + i * num_features_, num_features_ * sizeof(float));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Dataset parse_svmlight(std::istream& in, const LoadOptions& options) {
  std::size_t width = options.num_features.value_or(0);
  std::vector<float> features;
  std::vector<int> labels;
  std::vector<std::string> qids;
  std::vector<std::pair<std::size_t, float>> entries;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 2) throw ParseError("malformed line", line_no);

    int label = 0;
    if (!parse_number(tokens[0], label)) {
      throw ParseError("label must be an integer, got '" +
                           std::string(tokens[0]) + "'",
                       line_no);
    }
    if (label < 0 || label > kMaxLabel) {
      throw ParseError("label must be in [0, 31], got " + std::to_string(label),
                       line_no);
    }
    if (tokens[1].substr(0, 4) != "qid:" || tokens[1].size() == 4) {
      throw ParseError("expected qid:<id> as second token", line_no);
    }

    entries.clear();
    std::size_t line_max = 0;
    for (std::size_t t = 2; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("malformed feature '" + std::string(tok) + "'", line_no);
      }
      long long fid = 0;
      if (!parse_number(tok.substr(0, colon), fid)) {
        throw ParseError("malformed feature id '" + std::string(tok) + "'",
                         line_no);
      }
      if (fid < 1) throw ParseError("feature id must be >= 1", line_no);
      float value = 0.0f;
      if (!parse_number(tok.substr(colon + 1), value) || !std::isfinite(value)) {
        throw ParseError("malformed feature value '" + std::string(tok) + "'",
                         line_no);
      }
      const auto index = static_cast<std::size_t>(fid);
      if (options.num_features && index > *options.num_features) {
        throw ParseError("feature id " + std::to_string(fid) +
                             " exceeds num_features " +
                             std::to_string(*options.num_features),
                         line_no);
      }
      entries.emplace_back(index - 1, value);
      line_max = std::max(line_max, index);
    }

    if (line_max > width) {
      // Widen the matrix already read; happens at most once per new max id.
      std::vector<float> widened(labels.size() * line_max, 0.0f);
      for (std::size_t r = 0; r < labels.size(); ++r) {
        std::copy_n(features.begin() + static_cast<std::ptrdiff_t>(r * width),
                    width,
                    widened.begin() + static_cast<std::ptrdiff_t>(r * line_max));
      }
      features = std::move(widened);
      width = line_max;
    }
    const std::size_t base = features.size();
    features.resize(base + width, 0.0f);
    for (const auto& [index, value] : entries) features[base + index] = value;
    labels.push_back(label);
    qids.emplace_back(tokens[1].substr(4));
  }
  if (labels.empty() && !options.allow_empty) {
    throw ParseError("empty dataset", 0);
  }
  return Dataset::from_dense(width, std::move(features), labels, qids);
}

Dataset load_svmlight(const std::filesystem::path& path,
                      const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path.string() + "'");
  try {
    return parse_svmlight(in, options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

void write_svmlight(const Dataset& ds, std::ostream& out) {
  std::string line;
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    line = std::to_string(ds.label(i));
    line += " qid:";
    line += ds.qid(i);
    const auto row = ds.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] == 0.0f) continue;
      line += ' ';
      line += std::to_string(j + 1);
      line += ':';
      line += shortest(row[j]);
    }
    line += '\n';
    out << line;
  }
}

void save_svmlight(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset '" + path.string() + "'");
  write_svmlight(ds, out);
}

int BinMapper::bin_of(std::size_t feature, double value) const {
  const auto& b = boundaries_[feature];
  return static_cast<int>(std::lower_bound(b.begin(), b.end(), value) - b.begin());
}

BinnedMatrix BinMapper::apply(const Dataset& ds) const {
  if (ds.num_features() != num_features()) {
    throw Error("bin mapper has " + std::to_string(num_features()) +
                " features, dataset has " + std::to_string(ds.num_features()));
  }
  BinnedMatrix out;
  out.num_rows = ds.num_rows();
  out.columns.resize(num_features());
  for (std::size_t j = 0; j < num_features(); ++j) {
    auto& column = out.columns[j];
    column.resize(ds.num_rows());
    for (std::size_t i = 0; i < ds.num_rows(); ++i) {
      column[i] = static_cast<std::uint8_t>(bin_of(j, ds.value(i, j)));
    }
  }
  return out;
}

BinMapper build_bins(const Dataset& ds, int max_bins) {
  if (max_bins < 2 || max_bins > BinMapper::kMaxBins) {
    throw ConfigError("max_bins must be in [2, 256]");
  }
  const std::size_t n = ds.num_rows();
  std::vector<std::vector<double>> boundaries(ds.num_features());
  std::vector<float> values(n);
  for (std::size_t j = 0; j < ds.num_features(); ++j) {
    for (std::size_t i = 0; i < n; ++i) values[i] = ds.value(i, j);
    std::sort(values.begin(), values.end());

    // Distinct values with their counts.
    std::vector<float> distinct;
    std::vector<std::size_t> counts;
    for (float v : values) {
      if (distinct.empty() || distinct.back() != v) {
        distinct.push_back(v);
        counts.push_back(0);
      }
      ++counts.back();
    }
    if (distinct.size() < 2) continue;

    // Cut after distinct value k when it is the first to reach the next
    // quantile position; every distinct value gets its own bin when they fit.
    std::vector<std::size_t> cuts;
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
      for (std::size_t k = 0; k + 1 < distinct.size(); ++k) cuts.push_back(k);
    } else {
      std::size_t cumulative = 0;
      std::size_t next_quantile = 1;
      for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
        cumulative += counts[k];
        bool cut = false;
        while (next_quantile < static_cast<std::size_t>(max_bins) &&
               cumulative * static_cast<std::size_t>(max_bins) >=
                   next_quantile * n) {
          ++next_quantile;
          cut = true;
        }
        if (cut) cuts.push_back(k);
      }
    }

    auto& bounds = boundaries[j];
    for (std::size_t k : cuts) {
      const double lo = distinct[k];
      const double hi = distinct[k + 1];
      double mid = lo + (hi - lo) / 2.0;
      if (!(mid < hi)) mid = lo;
      bounds.push_back(mid);
    }
  }
  return BinMapper(std::move(boundaries));
}

}  // namespace ilmart
