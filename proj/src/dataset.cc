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

#include "sam/dataset.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "sam/random.h"

namespace sam {

Dataset::Dataset(Matrix values, std::vector<std::string> feature_names,
                 std::optional<std::vector<bool>> labels, std::string name)
    : values_(std::move(values)),
      feature_names_(std::move(feature_names)),
      labels_(std::move(labels)),
      name_(std::move(name)) {
  if (static_cast<Eigen::Index>(feature_names_.size()) != values_.cols()) {
    throw std::invalid_argument("dataset: " +
                                std::to_string(feature_names_.size()) +
                                " feature names for " +
                                std::to_string(values_.cols()) + " columns");
  }
  std::set<std::string> seen;
  for (const auto& f : feature_names_) {
    if (!seen.insert(f).second) {
      throw std::invalid_argument("dataset: duplicate feature name '" + f +
                                  "'");
    }
  }
  if (labels_ &&
      static_cast<Eigen::Index>(labels_->size()) != values_.rows()) {
    throw std::invalid_argument("dataset: " + std::to_string(labels_->size()) +
                                " labels for " +
                                std::to_string(values_.rows()) + " rows");
  }
  if (!values_.allFinite()) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        if (!std::isfinite(values_(i, j))) {
          throw std::invalid_argument(
              "dataset: non-finite value at row " + std::to_string(i) +
              ", column '" + feature_names_[j] + "'");
        }
      }
    }
  }
}

std::size_t Dataset::anomaly_count() const {
  if (!labels_) return 0;
  return static_cast<std::size_t>(
      std::count(labels_->begin(), labels_->end(), true));
}

Dataset Dataset::SelectRows(std::span<const Eigen::Index> indices) const {
  Matrix out(static_cast<Eigen::Index>(indices.size()), values_.cols());
  std::optional<std::vector<bool>> out_labels;
  if (labels_) out_labels.emplace(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const Eigen::Index src = indices[r];
    if (src < 0 || src >= values_.rows()) {
      throw std::out_of_range("row index " + std::to_string(src) +
                              " out of range");
    }
    out.row(static_cast<Eigen::Index>(r)) = values_.row(src);
    if (labels_) (*out_labels)[r] = (*labels_)[src];
  }
  return Dataset(std::move(out), feature_names_, std::move(out_labels), name_);
}

Dataset Dataset::WithName(std::string name) const {
  Dataset copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

void GeneratorConfig::Validate() const {
  if (n < 1) throw std::invalid_argument("generator: n must be positive");
  if (d < 1) throw std::invalid_argument("generator: d must be positive");
  if (!(contamination >= 0.0 && contamination < 1.0)) {
    throw std::invalid_argument("generator: contamination must be in [0, 1)");
  }
  if (contamination > 0.0 && contamination * static_cast<double>(n) < 1.0) {
    throw std::invalid_argument(
        "generator: contamination * n must be at least 1");
  }
  if (!(cluster_shift > 0.0) || !std::isfinite(cluster_shift)) {
    throw std::invalid_argument("generator: cluster_shift must be positive");
  }
}

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      break;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

Dataset ParseCsv(std::string_view text, const CsvOptions& options,
                 std::string name) {
  // Strip a UTF-8 byte order mark.
  if (text.size() >= 3 && std::memcmp(text.data(), "\xEF\xBB\xBF", 3) == 0) {
    text.remove_prefix(3);
  }
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!Trim(line).empty()) lines.push_back(line);
      start = end + 1;
    }
  }
  if (lines.empty()) throw DataError("csv: missing header row");

  const auto header = SplitFields(lines.front());
  std::optional<std::size_t> label_index;
  if (options.label_column) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == *options.label_column) label_index = c;
    }
    if (!label_index) {
      throw DataError("csv: unknown label column '" + *options.label_column +
                      "'");
    }
  }
  std::vector<std::string> feature_names;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (label_index && c == *label_index) continue;
    feature_names.emplace_back(header[c]);
    feature_cols.push_back(c);
  }

  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  const auto d = static_cast<Eigen::Index>(feature_cols.size());
  Matrix values(n, d);
  std::optional<std::vector<bool>> labels;
  if (label_index) labels.emplace(static_cast<std::size_t>(n));

  for (Eigen::Index r = 0; r < n; ++r) {
    // Row numbers in messages are 1-based file lines (header = line 1).
    const auto fields = SplitFields(lines[static_cast<std::size_t>(r) + 1]);
    if (fields.size() != header.size()) {
      throw DataError("csv: row " + std::to_string(r + 2) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(header.size()));
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      const std::string_view cell = fields[feature_cols[j]];
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size() ||
          cell.empty()) {
        throw DataError("csv: row " + std::to_string(r + 2) + ", column '" +
                        feature_names[j] + "': cannot parse '" +
                        std::string(cell) + "' as a number");
      }
      if (!std::isfinite(value)) {
        throw DataError("csv: row " + std::to_string(r + 2) + ", column '" +
                        feature_names[j] + "': non-finite value '" +
                        std::string(cell) + "'");
      }
      values(r, j) = value;
    }
    if (label_index) {
      (*labels)[static_cast<std::size_t>(r)] =
          fields[*label_index] == options.anomaly_value;
    }
  }
  try {
    return Dataset(std::move(values), std::move(feature_names),
                   std::move(labels), std::move(name));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("csv: ") + e.what());
  }
}

Dataset LoadCsv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("csv: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) {
    name = name.substr(slash + 1);
  }
  if (const auto dot = name.rfind('.'); dot != std::string::npos && dot > 0) {
    name = name.substr(0, dot);
  }
  return ParseCsv(buffer.str(), options, name);
}

std::string FormatCsv(const Dataset& ds, const std::string& label_column) {
  std::string out;
  for (std::size_t j = 0; j < ds.feature_names().size(); ++j) {
    if (j) out += ',';
    out += ds.feature_names()[j];
  }
  if (ds.has_labels()) out += ',' + label_column;
  out += '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.cols(); ++j) {
      if (j) out += ',';
      std::snprintf(buf, sizeof(buf), "%.17g", ds.values()(i, j));
      out += buf;
    }
    if (ds.has_labels()) {
      out += (*ds.labels())[static_cast<std::size_t>(i)] ? ",1" : ",0";
    }
    out += '\n';
  }
  return out;
}

void WriteCsv(const Dataset& ds, const std::string& path,
              const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("csv: cannot write '" + path + "'");
  out << FormatCsv(ds, label_column);
  if (!out) throw DataError("csv: write failed for '" + path + "'");
}

Dataset GenerateMulcrossLike(const GeneratorConfig& cfg) {
  cfg.Validate();
  const auto anomalies = static_cast<Eigen::Index>(
      std::floor(cfg.contamination * static_cast<double>(cfg.n)));
  const Eigen::Index inliers = cfg.n - anomalies;
  const Eigen::Index positive_cluster = anomalies - anomalies / 2;

  Rng rng(cfg.seed);
  Matrix values(cfg.n, cfg.d);
  // Row-major fill so the leading inlier rows do not depend on n.
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    double center = 0.0;
    double scale = 1.0;
    if (i >= inliers) {
      center = (i - inliers < positive_cluster) ? cfg.cluster_shift
                                                : -cfg.cluster_shift;
      scale = 0.5;  // sqrt(0.25)
    }
    for (Eigen::Index j = 0; j < cfg.d; ++j) {
      values(i, j) = center + scale * rng.Normal();
    }
  }
  std::vector<bool> labels(static_cast<std::size_t>(cfg.n), false);
  for (Eigen::Index i = inliers; i < cfg.n; ++i) {
    labels[static_cast<std::size_t>(i)] = true;
  }
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < cfg.d; ++j) {
    names.push_back("x" + std::to_string(j + 1));
  }
  return Dataset(std::move(values), std::move(names), std::move(labels),
                 "mulcross");
}

std::vector<Eigen::Index> BootstrapIndices(Eigen::Index n,
                                           std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("bootstrap: empty dataset");
  Rng rng(seed);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (auto& i : idx) {
    i = static_cast<Eigen::Index>(rng.Below(static_cast<std::uint64_t>(n)));
  }
  return idx;
}

Dataset Bootstrap(const Dataset& ds, std::uint64_t seed) {
  const auto idx = BootstrapIndices(ds.rows(), seed);
  return ds.SelectRows(idx);
}

SplitPair Split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  const Eigen::Index n = ds.rows();
  if (n < 2) throw std::invalid_argument("split: need at least 2 rows");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split: train fraction must be in (0, 1)");
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng(seed);
  // Fisher-Yates, high to low.
  for (std::size_t i = perm.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.Below(i + 1));
    std::swap(perm[i], perm[j]);
  }
  auto cut = static_cast<Eigen::Index>(
      std::floor(train_fraction * static_cast<double>(n)));
  cut = std::clamp<Eigen::Index>(cut, 1, n - 1);

  std::vector<Eigen::Index> train_rows(perm.begin(), perm.begin() + cut);
  std::vector<Eigen::Index> test_rows(perm.begin() + cut, perm.end());
  Dataset train = ds.SelectRows(train_rows);
  Dataset test = ds.SelectRows(test_rows);
  return SplitPair{std::move(train), std::move(test), seed,
                   std::move(train_rows), std::move(test_rows)};
}

std::uint64_t RowFingerprint(const Matrix& values, Eigen::Index row) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    double v = values(row, j);
    if (v == 0.0) v = 0.0;
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string FingerprintHex(std::uint64_t fingerprint) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fingerprint));
  return buf;
}

}  // namespace sam
