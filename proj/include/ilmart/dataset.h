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

#ifndef ILMART_DATASET_H_
#define ILMART_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ilmart {

inline constexpr int kMaxLabel = 31;

// Rows of one query, in file order.
struct QueryGroup {
  std::string qid;
  std::vector<std::size_t> rows;
};

// Query-grouped dense feature matrix with integer relevance labels.
//
// Features are stored row-major as float. Feature ids in files are 1-based;
// every in-memory index is 0-based.
class Dataset {
 public:
  explicit Dataset(std::size_t num_features = 0)
      : num_features_(num_features) {}

  // Builds from a row-major matrix of labels.size() rows.
  static Dataset from_dense(std::size_t num_features, std::vector<float> features,
                            std::span<const int> labels,
                            std::span<const std::string> qids);

  // Appends one row. `features.size()` must equal num_features().
  void add_row(std::string_view qid, int label, std::span<const float> features);

  std::size_t num_rows() const { return labels_.size(); }
  std::size_t num_features() const { return num_features_; }
  bool empty() const { return labels_.empty(); }

  std::span<const float> row(std::size_t i) const {
    return {features_.data() + i * num_features_, num_features_};
  }
  float value(std::size_t i, std::size_t feature) const {
    return features_[i * num_features_ + feature];
  }
  int label(std::size_t i) const { return labels_[i]; }
  const std::string& qid(std::size_t i) const {
    return groups_[row_group_[i]].qid;
  }

  std::span<const int> labels() const { return labels_; }
  const std::vector<QueryGroup>& groups() const { return groups_; }
  std::size_t num_queries() const { return groups_.size(); }
  int max_label() const;

  // Stable FNV-1a digest over qids, labels and feature bits.
  std::string digest() const;

 private:
  std::size_t num_features_;
  std::vector<float> features_;
  std::vector<int> labels_;
  std::vector<std::size_t> row_group_;
  std::vector<QueryGroup> groups_;
  std::unordered_map<std::string, std::size_t> group_index_;
};

struct LoadOptions {
  // Forces d; feature ids above it are rejected.
  std::optional<std::size_t> num_features;
  // Accept files without a single data line (yields an empty dataset).
  bool allow_empty = false;
};

// Parses LETOR/SVMLight text: `<label> qid:<qid> (<fid>:<value>)* (# ...)?`.
Dataset parse_svmlight(std::istream& in, const LoadOptions& options = {});
Dataset load_svmlight(const std::filesystem::path& path,
                      const LoadOptions& options = {});

// Writes the non-zero features of every row with shortest round-trip floats.
void write_svmlight(const Dataset& ds, std::ostream& out);
void save_svmlight(const Dataset& ds, const std::filesystem::path& path);

// Column-major bin indices for one dataset, produced by a BinMapper.
struct BinnedMatrix {
  std::size_t num_rows = 0;
  std::vector<std::vector<std::uint8_t>> columns;

  std::uint8_t bin(std::size_t row, std::size_t feature) const {
    return columns[feature][row];
  }
};

// Per-feature bin boundaries. A value x falls in bin b where b is the index of
// the first boundary >= x (or the last bin when none is), so `x <= boundary[b]`
// is exactly `bin(x) <= b`.
class BinMapper {
 public:
  static constexpr int kMaxBins = 256;

  BinMapper() = default;
  explicit BinMapper(std::vector<std::vector<double>> boundaries)
      : boundaries_(std::move(boundaries)) {}

  std::size_t num_features() const { return boundaries_.size(); }
  int num_bins(std::size_t feature) const {
    return static_cast<int>(boundaries_[feature].size()) + 1;
  }
  const std::vector<double>& boundaries(std::size_t feature) const {
    return boundaries_[feature];
  }
  const std::vector<std::vector<double>>& all_boundaries() const {
    return boundaries_;
  }

  int bin_of(std::size_t feature, double value) const;

  // Upper raw boundary of `bin`; splitting at `bin` sends `x <= threshold` left.
  double threshold(std::size_t feature, int bin) const {
    return boundaries_[feature][static_cast<std::size_t>(bin)];
  }

  BinnedMatrix apply(const Dataset& ds) const;

  friend bool operator==(const BinMapper&, const BinMapper&) = default;

 private:
  std::vector<std::vector<double>> boundaries_;
};

// Quantile binning over distinct values; at most `max_bins` bins per feature.
BinMapper build_bins(const Dataset& ds, int max_bins);

}  // namespace ilmart

#endif  // ILMART_DATASET_H_
