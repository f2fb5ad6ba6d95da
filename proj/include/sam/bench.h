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

// Repeated bootstrap -> split -> fit -> score -> evaluate, aggregated as
// mean +/- 2 sample standard deviations per (dataset, model, metric).
//
// Seeds: repeat r of dataset D uses
//   base = MixSeed(MixSeed(seed, r), HashName(D))
// with stream 1 for the bootstrap, stream 2 for the split and
// HashName(model label) for the detector, so a cell never depends on the order
// of models or datasets in the configuration.

#ifndef SAM_BENCH_H_
#define SAM_BENCH_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "sam/dataset.h"
#include "sam/detector.h"

namespace sam {

enum class Metric { kRocAuc, kPrAuc };

std::string MetricName(Metric metric);  // "roc_auc" / "pr_auc"
std::string MetricTitle(Metric metric);  // "ROC AUC" / "PR AUC"
std::optional<Metric> ParseMetric(std::string_view name);

struct BenchConfig {
  std::vector<Dataset> datasets;
  std::vector<ModelSpec> models;
  int repeats = 10;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  std::vector<Metric> metrics = {Metric::kRocAuc, Metric::kPrAuc};
  // Concurrent (dataset, repeat) jobs; 0 = hardware concurrency.
  std::size_t threads = 1;
  // Keep per-repeat row bookkeeping in BenchTable::traces.
  bool record_traces = false;
};

struct BenchCell {
  // One entry per repeat; nullopt when the detector or metric failed.
  std::vector<std::optional<double>> values;
  // Set only when every repeat produced a value.
  std::optional<double> mean;
  std::optional<double> two_sigma;
  // First failure reason, when any repeat failed.
  std::string failure;

  bool ok() const { return mean.has_value(); }
};

struct RepeatTrace {
  std::string dataset;
  int repeat = 0;
  std::uint64_t bootstrap_seed = 0;
  std::uint64_t split_seed = 0;
  std::vector<Eigen::Index> train_rows;  // rows of the bootstrapped sample
  std::vector<Eigen::Index> test_rows;
  // Fingerprint of every matrix handed to a Fit routine, by model label.
  std::map<std::string, std::uint64_t> fit_input_fingerprints;
  std::uint64_t train_fingerprint = 0;
  std::uint64_t test_fingerprint = 0;
};

struct BenchTable {
  using Key = std::tuple<std::string, std::string, Metric>;  // dataset, model

  std::vector<std::string> datasets;
  std::vector<std::string> models;
  std::vector<Metric> metrics;
  std::map<Key, BenchCell> cells;
  // Configuration echo, emitted as comment lines.
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<RepeatTrace> traces;

  const BenchCell& cell(const std::string& dataset, const std::string& model,
                        Metric metric) const;
};

// Throws DataError for an unlabeled dataset and std::invalid_argument for an
// empty model list or invalid repeat/fraction settings. Detector failures are
// recorded in the affected cells and never abort the run.
BenchTable RunBench(const BenchConfig& cfg);

// Order-sensitive FNV-1a over all rows of a matrix.
std::uint64_t MatrixFingerprint(const Matrix& values);

enum class TableFormat { kCsv, kMarkdown };

// kCsv: long form "dataset,model,metric,mean,two_sigma" after "# key=value"
// comment lines; failed cells leave mean and two_sigma empty.
// kMarkdown: one table per metric, models as rows and datasets as columns,
// cells "m.mm ± s.ss" with the best mean per column in bold and the second
// best underlined; failed cells show "—" with a footnote.
std::string EmitTable(const BenchTable& table, TableFormat format);

// "m.mm ± s.ss".
std::string FormatCell(double mean, double two_sigma);

}  // namespace sam

#endif  // SAM_BENCH_H_
