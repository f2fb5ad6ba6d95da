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

#include "sam/bench.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>

#include "sam/metrics.h"
#include "sam/random.h"

namespace sam {

std::string MetricName(Metric metric) {
  return metric == Metric::kRocAuc ? "roc_auc" : "pr_auc";
}

std::string MetricTitle(Metric metric) {
  return metric == Metric::kRocAuc ? "ROC AUC" : "PR AUC";
}

std::optional<Metric> ParseMetric(std::string_view name) {
  if (name == "roc_auc") return Metric::kRocAuc;
  if (name == "pr_auc") return Metric::kPrAuc;
  return std::nullopt;
}

const BenchCell& BenchTable::cell(const std::string& dataset,
                                  const std::string& model,
                                  Metric metric) const {
  const auto it = cells.find({dataset, model, metric});
  if (it == cells.end()) {
    throw std::out_of_range("no cell for (" + dataset + ", " + model + ", " +
                            MetricName(metric) + ")");
  }
  return it->second;
}

std::uint64_t MatrixFingerprint(const Matrix& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    const std::uint64_t row = RowFingerprint(values, r);
    for (int b = 0; b < 8; ++b) {
      h ^= (row >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

namespace {

double Evaluate(Metric metric, const Vector& scores,
                const std::vector<bool>& labels) {
  const std::span<const double> s(scores.data(),
                                  static_cast<std::size_t>(scores.size()));
  return metric == Metric::kRocAuc ? RocAuc(s, labels) : PrAuc(s, labels);
}

// Records what actually reaches Fit.
class FitRecorder : public Detector {
 public:
  FitRecorder(std::unique_ptr<Detector> inner, std::uint64_t* sink)
      : inner_(std::move(inner)), sink_(sink) {}
  void Fit(const Matrix& train) override {
    *sink_ = MatrixFingerprint(train);
    inner_->Fit(train);
  }
  Vector Score(const Matrix& x) const override { return inner_->Score(x); }

 private:
  std::unique_ptr<Detector> inner_;
  std::uint64_t* sink_;
};

struct ModelOutcome {
  // Indexed like cfg.metrics.
  std::vector<std::optional<double>> values;
  std::string failure;
};

struct JobResult {
  std::vector<ModelOutcome> models;  // indexed like cfg.models
  RepeatTrace trace;
};

JobResult RunRepeat(
    const BenchConfig& cfg, const Dataset& ds, int repeat,
    const std::vector<std::shared_ptr<const ExternalScores>>& external) {
  JobResult job;
  const std::uint64_t base = MixSeed(
      MixSeed(cfg.seed, static_cast<std::uint64_t>(repeat)), HashName(ds.name()));
  const std::uint64_t bootstrap_seed = MixSeed(base, 1);
  const std::uint64_t split_seed = MixSeed(base, 2);

  const Dataset sample = Bootstrap(ds, bootstrap_seed);
  const SplitPair split = Split(sample, cfg.train_fraction, split_seed);
  const std::vector<bool>& test_labels = *split.test.labels();

  job.trace.dataset = ds.name();
  job.trace.repeat = repeat;
  job.trace.bootstrap_seed = bootstrap_seed;
  job.trace.split_seed = split_seed;
  if (cfg.record_traces) {
    job.trace.train_rows = split.train_rows;
    job.trace.test_rows = split.test_rows;
    job.trace.train_fingerprint = MatrixFingerprint(split.train.values());
    job.trace.test_fingerprint = MatrixFingerprint(split.test.values());
  }

  job.models.resize(cfg.models.size());
  for (std::size_t m = 0; m < cfg.models.size(); ++m) {
    const ModelSpec& spec = cfg.models[m];
    ModelOutcome& outcome = job.models[m];
    outcome.values.assign(cfg.metrics.size(), std::nullopt);
    try {
      std::unique_ptr<Detector> detector =
          MakeDetector(spec, MixSeed(base, HashName(spec.label)), external[m]);
      if (cfg.record_traces) {
        detector = std::make_unique<FitRecorder>(
            std::move(detector),
            &job.trace.fit_input_fingerprints[spec.label]);
      }
      detector->Fit(split.train.values());
      const Vector scores = detector->Score(split.test.values());
      for (std::size_t k = 0; k < cfg.metrics.size(); ++k) {
        try {
          outcome.values[k] = Evaluate(cfg.metrics[k], scores, test_labels);
        } catch (const std::exception& e) {
          if (outcome.failure.empty()) {
            outcome.failure = "repeat " + std::to_string(repeat) + ": " +
                              MetricName(cfg.metrics[k]) + ": " + e.what();
          }
        }
      }
    } catch (const std::exception& e) {
      outcome.failure = "repeat " + std::to_string(repeat) + ": " + e.what();
    }
  }
  return job;
}

void Summarize(BenchCell& cell) {
  const std::size_t r = cell.values.size();
  for (const auto& v : cell.values) {
    if (!v) return;
  }
  double sum = 0.0;
  for (const auto& v : cell.values) sum += *v;
  const double mean = sum / static_cast<double>(r);
  double sq = 0.0;
  for (const auto& v : cell.values) sq += (*v - mean) * (*v - mean);
  cell.mean = mean;
  cell.two_sigma =
      r > 1 ? 2.0 * std::sqrt(sq / static_cast<double>(r - 1)) : 0.0;
}

// Shortest text that parses back to the same double.
std::string FormatNumber(double v) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

}  // namespace

BenchTable RunBench(const BenchConfig& cfg) {
  if (cfg.models.empty()) throw std::invalid_argument("bench: no models");
  if (cfg.datasets.empty()) throw std::invalid_argument("bench: no datasets");
  if (cfg.repeats < 1) throw std::invalid_argument("bench: repeats must be >= 1");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw std::invalid_argument("bench: train_fraction must be in (0, 1)");
  }
  if (cfg.metrics.empty()) throw std::invalid_argument("bench: no metrics");
  std::set<std::string> names;
  for (const auto& ds : cfg.datasets) {
    if (!ds.has_labels()) {
      throw DataError("bench: dataset '" + ds.name() + "' has no labels");
    }
    if (ds.rows() < 2) {
      throw DataError("bench: dataset '" + ds.name() + "' has fewer than 2 rows");
    }
    if (!names.insert(ds.name()).second) {
      throw std::invalid_argument("bench: duplicate dataset name '" +
                                  ds.name() + "'");
    }
  }
  names.clear();
  for (const auto& m : cfg.models) {
    if (!names.insert(m.label).second) {
      throw std::invalid_argument("bench: duplicate model label '" + m.label +
                                  "'");
    }
  }

  // External score files are read once and shared across repeats.
  std::vector<std::shared_ptr<const ExternalScores>> external(cfg.models.size());
  for (std::size_t m = 0; m < cfg.models.size(); ++m) {
    if (cfg.models[m].kind == DetectorKind::kExternal) {
      external[m] = std::make_shared<const ExternalScores>(
          LoadExternalScores(cfg.models[m].scores_path));
    }
  }

  const std::size_t repeats = static_cast<std::size_t>(cfg.repeats);
  std::vector<JobResult> jobs(cfg.datasets.size() * repeats);
  ParallelFor(jobs.size(), cfg.threads, [&](std::size_t job) {
    const Dataset& ds = cfg.datasets[job / repeats];
    jobs[job] = RunRepeat(cfg, ds, static_cast<int>(job % repeats), external);
  });

  BenchTable table;
  table.metrics = cfg.metrics;
  for (const auto& ds : cfg.datasets) table.datasets.push_back(ds.name());
  for (const auto& m : cfg.models) table.models.push_back(m.label);
  for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
    for (std::size_t m = 0; m < cfg.models.size(); ++m) {
      for (std::size_t k = 0; k < cfg.metrics.size(); ++k) {
        BenchCell cell;
        for (std::size_t r = 0; r < repeats; ++r) {
          const ModelOutcome& outcome = jobs[d * repeats + r].models[m];
          cell.values.push_back(outcome.values[k]);
          if (!outcome.values[k] && cell.failure.empty()) {
            cell.failure = outcome.failure.empty() ? "unknown failure"
                                                   : outcome.failure;
          }
        }
        Summarize(cell);
        table.cells[{table.datasets[d], table.models[m], cfg.metrics[k]}] =
            std::move(cell);
      }
    }
  }
  if (cfg.record_traces) {
    for (auto& job : jobs) table.traces.push_back(std::move(job.trace));
  }

  table.config.emplace_back("seed", std::to_string(cfg.seed));
  table.config.emplace_back("repeats", std::to_string(cfg.repeats));
  table.config.emplace_back("train_fraction", FormatNumber(cfg.train_fraction));
  std::string metrics;
  for (Metric metric : cfg.metrics) {
    metrics += (metrics.empty() ? "" : ",") + MetricName(metric);
  }
  table.config.emplace_back("metrics", metrics);
  std::string models;
  for (const auto& m : cfg.models) models += (models.empty() ? "" : ",") + m.label;
  table.config.emplace_back("models", models);
  for (const auto& ds : cfg.datasets) {
    table.config.emplace_back(
        "dataset." + ds.name(),
        std::to_string(ds.rows()) + " rows, " + std::to_string(ds.cols()) +
            " features, " + std::to_string(ds.anomaly_count()) + " anomalies");
  }
  return table;
}

std::string FormatCell(double mean, double two_sigma) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean, two_sigma);
  return buf;
}

std::string EmitTable(const BenchTable& table, TableFormat format) {
  std::string out;
  if (format == TableFormat::kCsv) {
    for (const auto& [key, value] : table.config) {
      out += "# " + key + "=" + value + "\n";
    }
    out += "dataset,model,metric,mean,two_sigma\n";
    for (Metric metric : table.metrics) {
      for (const auto& ds : table.datasets) {
        for (const auto& model : table.models) {
          const BenchCell& c = table.cell(ds, model, metric);
          out += ds + "," + model + "," + MetricName(metric) + ",";
          if (c.ok()) out += FormatNumber(*c.mean) + "," + FormatNumber(*c.two_sigma);
          else out += ",";
          out += "\n";
        }
      }
    }
    return out;
  }

  for (const auto& [key, value] : table.config) {
    out += "<!-- " + key + ": " + value + " -->\n";
  }
  std::vector<std::string> footnotes;
  for (Metric metric : table.metrics) {
    out += "\n### " + MetricTitle(metric) + "\n\n| Model |";
    for (const auto& ds : table.datasets) out += " " + ds + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < table.datasets.size(); ++i) out += "---|";
    out += "\n";

    // Best and second-best distinct means per dataset column.
    std::vector<std::optional<double>> best(table.datasets.size());
    std::vector<std::optional<double>> second(table.datasets.size());
    for (std::size_t d = 0; d < table.datasets.size(); ++d) {
      std::vector<double> means;
      for (const auto& model : table.models) {
        const BenchCell& c = table.cell(table.datasets[d], model, metric);
        if (c.ok()) means.push_back(*c.mean);
      }
      std::sort(means.begin(), means.end(), std::greater<>());
      means.erase(std::unique(means.begin(), means.end()), means.end());
      if (!means.empty()) best[d] = means[0];
      if (means.size() > 1) second[d] = means[1];
    }

    for (const auto& model : table.models) {
      out += "| " + model + " |";
      for (std::size_t d = 0; d < table.datasets.size(); ++d) {
        const BenchCell& c = table.cell(table.datasets[d], model, metric);
        if (!c.ok()) {
          footnotes.push_back(model + " on " + table.datasets[d] + " (" +
                              MetricTitle(metric) + "): " + c.failure);
          out += " —[^" + std::to_string(footnotes.size()) + "] |";
          continue;
        }
        char mean_text[32];
        char sigma_text[32];
        std::snprintf(mean_text, sizeof(mean_text), "%.2f", *c.mean);
        std::snprintf(sigma_text, sizeof(sigma_text), "%.2f", *c.two_sigma);
        std::string shown = std::string(mean_text) + " ± " + sigma_text;
        if (best[d] && *c.mean == *best[d]) {
          shown = "**" + shown + "**";
        } else if (second[d] && *c.mean == *second[d]) {
          shown = "<u>" + shown + "</u>";
        }
        out += " " + shown + " |";
      }
      out += "\n";
    }
  }
  if (!footnotes.empty()) {
    out += "\n";
    for (std::size_t i = 0; i < footnotes.size(); ++i) {
      out += "[^" + std::to_string(i + 1) + "]: " + footnotes[i] + "\n";
    }
  }
  return out;
}

}  // namespace sam
