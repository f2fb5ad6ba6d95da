// Copyright 2026 The SAM Authors.
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

#ifndef SAM_DATASET_H_
#define SAM_DATASET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sam/common.h"

namespace sam {

// Numeric table with n rows (events) and d columns (features). Labels, when
// present, use true = anomaly. Immutable after construction.
class Dataset {
 public:
  // Throws std::invalid_argument when an invariant is violated: non-finite
  // entries, duplicate or miscounted feature names, label count != n.
  Dataset(Matrix values, std::vector<std::string> feature_names,
          std::optional<std::vector<bool>> labels = std::nullopt,
          std::string name = "");

  const Matrix& values() const { return values_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const std::optional<std::vector<bool>>& labels() const { return labels_; }
  bool has_labels() const { return labels_.has_value(); }
  const std::string& name() const { return name_; }

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  std::size_t anomaly_count() const;

  // Rows gathered in the given order; repeated indices are allowed.
  Dataset SelectRows(std::span<const Eigen::Index> indices) const;

  Dataset WithName(std::string name) const;

 private:
  Matrix values_;
  std::vector<std::string> feature_names_;
  std::optional<std::vector<bool>> labels_;
  std::string name_;
};

struct SplitPair {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  // Source-row index of every train/test row, in output order.
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> test_rows;
};

struct GeneratorConfig {
  Eigen::Index n = 262144;
  Eigen::Index d = 4;
  double contamination = 0.10;
  // Anomaly-cluster displacement in inlier standard deviations.
  double cluster_shift = 2.0;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument describing the first violated constraint.
  void Validate() const;
};

struct CsvOptions {
  std::optional<std::string> label_column;
  // Label cells equal to this string mark anomalies. Defaults to "1".
  std::string anomaly_value = "1";
};

// Reads a header-first, comma-separated numeric file. The label column (if
// named) is removed from the features. Throws DataError with row/column
// context on malformed input.
Dataset LoadCsv(const std::string& path, const CsvOptions& options = {});
Dataset ParseCsv(std::string_view text, const CsvOptions& options = {},
                 std::string name = "");

// Writes values with 17 significant digits. When the dataset is labeled, a
// trailing `label_column` column holds 1 (anomaly) or 0.
void WriteCsv(const Dataset& ds, const std::string& path,
              const std::string& label_column = "label");
std::string FormatCsv(const Dataset& ds,
                      const std::string& label_column = "label");

// Inliers ~ N(0, I). floor(contamination * n) anomalies are split between two
// clusters N(+shift * 1, 0.25 I) and N(-shift * 1, 0.25 I); the first cluster
// takes the extra point when the count is odd. Anomalies occupy the trailing
// rows.
Dataset GenerateMulcrossLike(const GeneratorConfig& cfg);

// n rows drawn uniformly with replacement.
Dataset Bootstrap(const Dataset& ds, std::uint64_t seed);
std::vector<Eigen::Index> BootstrapIndices(Eigen::Index n, std::uint64_t seed);

// Random permutation, then the first floor(train_fraction * n) rows train.
// Both halves are kept non-empty.
SplitPair Split(const Dataset& ds, double train_fraction, std::uint64_t seed);

// 64-bit FNV-1a over the IEEE-754 bytes of one row (with -0.0 folded to 0.0).
std::uint64_t RowFingerprint(const Matrix& values, Eigen::Index row);
std::string FingerprintHex(std::uint64_t fingerprint);

}  // namespace sam

#endif  // SAM_DATASET_H_
