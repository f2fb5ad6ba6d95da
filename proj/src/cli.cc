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

#include "sam/cli.h"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "sam/bench.h"
#include "sam/sam.h"

namespace sam::cli {

namespace {

// Raised for bad flag values that CLI11 cannot check on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitList(std::string_view text, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = Trim(text.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

template <typename T>
T ParseNumber(std::string_view text, const std::string& what) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument(what + ": cannot parse '" + std::string(text) +
                                "'");
  }
  return value;
}

bool ParseBool(std::string_view text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument(what + ": expected true/false, got '" +
                              std::string(text) + "'");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::int64_t CreationTime() {
  // Reproducible builds convention.
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      return ParseNumber<std::int64_t>(epoch, "SOURCE_DATE_EPOCH");
    } catch (const std::invalid_argument&) {
    }
  }
  return static_cast<std::int64_t>(std::time(nullptr));
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
  std::string input;
  std::string output_model;
  bool ransac = false;
  bool normalize_default = false;
  bool zscore = false;
  std::uint64_t seed = 0;
  std::string label_col;
  std::string anomaly_value = "1";
  int ransac_max_iterations = 100;
  std::optional<double> ransac_threshold;
  std::size_t threads = 1;
};

int CmdFit(const FitArgs& a, std::ostream& err) {
  CsvOptions csv;
  if (!a.label_col.empty()) csv.label_column = a.label_col;
  csv.anomaly_value = a.anomaly_value;
  const Dataset ds = LoadCsv(a.input, csv);

  FitOptions options;
  options.variant = {a.ransac, a.normalize_default};
  options.seed = a.seed;
  options.zscore = a.zscore;
  options.threads = a.threads;
  options.ransac.max_iterations = a.ransac_max_iterations;
  options.ransac.residual_threshold = a.ransac_threshold;
  SamModel model;
  try {
    model = FitSam(ds, options);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  model.created_unix_seconds = CreationTime();
  SaveModel(model, a.output_model);

  err << "fitted " << model.dimension() << " features on " << ds.rows()
      << " rows (" << options.variant.Name() << ")\n";
  for (std::size_t i = 0; i < model.fit_meta.size(); ++i) {
    const auto& m = model.fit_meta[i];
    err << "  " << model.feature_names[i] << ": "
        << (m.used_ransac ? "ransac" : "ols")
        << " converged=" << (m.converged ? "yes" : "no")
        << " degenerate=" << (m.degenerate ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreArgs {
  std::string model;
  std::string input;
  std::optional<bool> normalize;
  double epsilon = 1e-9;
  std::optional<double> percentile;
  int attribute_top = 0;
  std::string label_col;
  std::string denominator = "observed";
};

int CmdScore(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  const SamModel model = LoadModel(a.model);
  CsvOptions csv;
  if (!a.label_col.empty()) csv.label_column = a.label_col;
  const Dataset ds = LoadCsv(a.input, csv);

  // Align input columns to the model by name.
  const std::set<std::string> want(model.feature_names.begin(),
                                   model.feature_names.end());
  const std::set<std::string> have(ds.feature_names().begin(),
                                   ds.feature_names().end());
  if (want != have) {
    std::string missing, extra;
    for (const auto& f : want) {
      if (!have.count(f)) missing += (missing.empty() ? "" : ", ") + f;
    }
    for (const auto& f : have) {
      if (!want.count(f)) extra += (extra.empty() ? "" : ", ") + f;
    }
    throw DataError("feature mismatch: missing from input [" + missing +
                    "], not in model [" + extra + "]");
  }
  Matrix x(ds.rows(), model.dimension());
  for (Eigen::Index j = 0; j < model.dimension(); ++j) {
    const auto& name = model.feature_names[static_cast<std::size_t>(j)];
    const auto it = std::find(ds.feature_names().begin(),
                              ds.feature_names().end(), name);
    x.col(j) = ds.values().col(it - ds.feature_names().begin());
  }

  ScoreOptions options;
  options.normalize = a.normalize.value_or(model.default_normalize);
  options.epsilon = a.epsilon;
  if (a.denominator == "observed") {
    options.denominator = Denominator::kObserved;
  } else if (a.denominator == "counterfactual") {
    options.denominator = Denominator::kCounterfactual;
  } else {
    throw UsageError("--denominator must be 'observed' or 'counterfactual'");
  }
  if (!(options.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
  if (a.percentile && !(*a.percentile > 0.0 && *a.percentile < 100.0)) {
    throw UsageError("--threshold-percentile must be in (0, 100)");
  }
  if (a.attribute_top < 0) throw UsageError("--attribute-top must be >= 0");
  if (ds.rows() == 0) throw DataError("input has no rows");

  const ScoreReport report = Score(model, x, options);
  std::vector<int> labels;
  if (a.percentile) labels = Label(report, *a.percentile);
  const int top = std::min<int>(a.attribute_top,
                                static_cast<int>(model.dimension()));

  std::string text = "row,score";
  if (a.percentile) text += ",label";
  for (int t = 1; t <= top; ++t) {
    const std::string s = std::to_string(t);
    text += ",feature_" + s + ",residual_" + s + ",share_" + s;
  }
  text += "\n";
  for (Eigen::Index r = 0; r < report.size(); ++r) {
    text += std::to_string(r) + "," + Num(report.score(r));
    if (a.percentile) {
      text += "," + std::to_string(labels[static_cast<std::size_t>(r)]);
    }
    if (top > 0) {
      const auto ranked = Attribute(report, r);
      for (int t = 0; t < top; ++t) {
        const auto& at = ranked[static_cast<std::size_t>(t)];
        text += "," + at.feature_name + "," + Num(at.magnitude) + "," +
                Num(at.share);
      }
    }
    text += "\n";
  }
  out << text;
  err << "scored " << report.size() << " rows ("
      << (options.normalize ? "normalized" : "raw") << " residuals)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
  std::string kind = "mulcross";
  GeneratorConfig cfg;
  std::string out;
};

int CmdGen(const GenArgs& a, std::ostream& out, std::ostream& err) {
  if (a.kind != "mulcross") {
    throw UsageError("--kind: unsupported generator '" + a.kind + "'");
  }
  try {
    a.cfg.Validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Dataset ds = GenerateMulcrossLike(a.cfg);
  if (a.out.empty()) {
    out << FormatCsv(ds);
  } else {
    WriteCsv(ds, a.out);
  }
  err << "generated " << ds.rows() << " rows, " << ds.cols() << " features, "
      << ds.anomaly_count() << " anomalies\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::vector<std::string> datasets;
  std::string models;
  std::optional<int> repeats;
  std::optional<std::uint64_t> seed;
  std::optional<double> train_fraction;
  std::string metrics;
  std::optional<std::size_t> threads;
  std::string out;
  std::string markdown;
};

const char* const kDefaultModels = "sam++,sam+-,sam-+,sam--,iforest,lof,knn";

int CmdBench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  BenchFile file;
  if (!a.config.empty()) {
    try {
      file = ParseBenchFile(ReadFile(a.config));
    } catch (const std::invalid_argument& e) {
      throw UsageError(a.config + ": " + e.what());
    }
  }
  BenchConfig cfg;
  cfg.seed = a.seed.value_or(file.seed.value_or(0));
  cfg.repeats = a.repeats.value_or(file.repeats.value_or(10));
  cfg.train_fraction = a.train_fraction.value_or(file.train_fraction.value_or(0.7));
  cfg.threads = a.threads.value_or(file.threads.value_or(1));

  std::vector<std::string> metric_names =
      !a.metrics.empty() ? SplitList(a.metrics) : file.metrics;
  if (!metric_names.empty()) {
    cfg.metrics.clear();
    for (const auto& m : metric_names) {
      const auto metric = ParseMetric(m);
      if (!metric) throw UsageError("unknown metric '" + m + "'");
      cfg.metrics.push_back(*metric);
    }
  }

  std::vector<std::string> model_names =
      !a.models.empty() ? SplitList(a.models) : file.models;
  if (model_names.empty()) model_names = SplitList(kDefaultModels);
  try {
    for (const auto& m : model_names) cfg.models.push_back(ModelSpec::Parse(m));
    ApplyTunables(cfg.models, file.tunables);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto& sources = !a.datasets.empty() ? a.datasets : file.datasets;
  if (sources.empty()) throw UsageError("no datasets (use --dataset or a config)");
  for (const auto& s : sources) {
    Dataset ds = LoadDatasetSource(s);
    if (!ds.has_labels()) {
      throw DataError("dataset '" + ds.name() + "' has no labels");
    }
    cfg.datasets.push_back(std::move(ds));
  }
  if (cfg.repeats < 1) throw UsageError("repeats must be >= 1");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw UsageError("train fraction must be in (0, 1)");
  }

  const BenchTable table = RunBench(cfg);
  const std::string csv = EmitTable(table, TableFormat::kCsv);
  const std::string md = EmitTable(table, TableFormat::kMarkdown);
  if (!a.out.empty()) WriteFile(a.out, csv);
  if (!a.markdown.empty()) WriteFile(a.markdown, md);
  out << md;
  for (const auto& [key, cell] : table.cells) {
    if (!cell.ok()) {
      err << "warning: " << std::get<1>(key) << " on " << std::get<0>(key)
          << ": " << cell.failure << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config helpers
// ---------------------------------------------------------------------------

BenchFile ParseBenchFile(std::string_view text) {
  BenchFile file;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    const std::string where = "line " + std::to_string(line_no) + " (" + key + ")";
    if (key == "seed") {
      file.seed = ParseNumber<std::uint64_t>(value, where);
    } else if (key == "repeats") {
      file.repeats = ParseNumber<int>(value, where);
    } else if (key == "train_fraction") {
      file.train_fraction = ParseNumber<double>(value, where);
    } else if (key == "threads") {
      file.threads = ParseNumber<std::size_t>(value, where);
    } else if (key == "metrics") {
      file.metrics = SplitList(value);
    } else if (key == "models") {
      file.models = SplitList(value);
    } else if (key == "dataset") {
      file.datasets.emplace_back(value);
    } else if (key.find('.') != std::string::npos) {
      file.tunables.emplace_back(key, std::string(value));
    } else {
      throw std::invalid_argument(where + ": unknown key");
    }
  }
  return file;
}

Dataset LoadDatasetSource(std::string_view source) {
  source = Trim(source);
  const auto colon = source.find(':');
  if (colon == std::string_view::npos) {
    CsvOptions csv;
    csv.label_column = "label";
    return LoadCsv(std::string(source), csv);
  }
  const std::string name(Trim(source.substr(0, colon)));
  const auto words = SplitList(source.substr(colon + 1), ' ');
  if (name.empty() || words.empty()) {
    throw UsageError("dataset '" + std::string(source) +
                     "': expected '<name>: <kind> key=value ...'");
  }
  std::vector<std::pair<std::string, std::string>> kv;
  for (std::size_t i = 1; i < words.size(); ++i) {
    const auto eq = words[i].find('=');
    if (eq == std::string::npos) {
      throw UsageError("dataset '" + name + "': expected key=value, got '" +
                       words[i] + "'");
    }
    kv.emplace_back(words[i].substr(0, eq), words[i].substr(eq + 1));
  }
  const std::string where = "dataset '" + name + "'";
  if (words[0] == "mulcross") {
    GeneratorConfig cfg;
    try {
      for (const auto& [k, v] : kv) {
        if (k == "n") cfg.n = ParseNumber<Eigen::Index>(v, where + " n");
        else if (k == "d") cfg.d = ParseNumber<Eigen::Index>(v, where + " d");
        else if (k == "contamination") cfg.contamination = ParseNumber<double>(v, where + " contamination");
        else if (k == "shift") cfg.cluster_shift = ParseNumber<double>(v, where + " shift");
        else if (k == "seed") cfg.seed = ParseNumber<std::uint64_t>(v, where + " seed");
        else throw std::invalid_argument(where + ": unknown key '" + k + "'");
      }
      cfg.Validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return GenerateMulcrossLike(cfg).WithName(name);
  }
  if (words[0] == "csv") {
    std::string path;
    CsvOptions csv;
    csv.label_column = "label";
    for (const auto& [k, v] : kv) {
      if (k == "path") path = v;
      else if (k == "label") csv.label_column = v;
      else if (k == "anomaly") csv.anomaly_value = v;
      else throw UsageError(where + ": unknown key '" + k + "'");
    }
    if (path.empty()) throw UsageError(where + ": missing path=");
    return LoadCsv(path, csv).WithName(name);
  }
  throw UsageError(where + ": unknown kind '" + words[0] + "'");
}

void ApplyTunables(
    std::vector<ModelSpec>& models,
    const std::vector<std::pair<std::string, std::string>>& tunables) {
  for (const auto& [key, value] : tunables) {
    const std::string where = key;
    bool known = true;
    for (auto& m : models) {
      if (key == "iforest.trees") {
        if (m.kind == DetectorKind::kIsolationForest) m.trees = ParseNumber<int>(value, where);
      } else if (key == "iforest.subsample") {
        if (m.kind == DetectorKind::kIsolationForest) m.subsample = ParseNumber<int>(value, where);
      } else if (key == "lof.k") {
        if (m.kind == DetectorKind::kLof) m.k = ParseNumber<int>(value, where);
      } else if (key == "knn.k") {
        if (m.kind == DetectorKind::kKnn) m.k = ParseNumber<int>(value, where);
      } else if (key == "sam.epsilon") {
        if (m.kind == DetectorKind::kSam) m.epsilon = ParseNumber<double>(value, where);
      } else if (key == "sam.zscore") {
        if (m.kind == DetectorKind::kSam) m.zscore = ParseBool(value, where);
      } else if (key == "ransac.max_iterations") {
        if (m.kind == DetectorKind::kSam) m.ransac.max_iterations = ParseNumber<int>(value, where);
      } else if (key == "ransac.min_samples") {
        if (m.kind == DetectorKind::kSam) m.ransac.min_samples = ParseNumber<int>(value, where);
      } else if (key == "ransac.residual_threshold") {
        if (m.kind == DetectorKind::kSam) {
          if (value == "auto") m.ransac.residual_threshold.reset();
          else m.ransac.residual_threshold = ParseNumber<double>(value, where);
        }
      } else if (key == "ransac.stop_inlier_fraction") {
        if (m.kind == DetectorKind::kSam) m.ransac.stop_inlier_fraction = ParseNumber<double>(value, where);
      } else {
        known = false;
      }
    }
    if (!known) throw std::invalid_argument("unknown tunable '" + key + "'");
  }
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Counterfactual anomaly detection: fit, score, bench, gen"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model on a CSV file");
  fit_cmd->add_option("--input", fit.input, "Training CSV")->required();
  fit_cmd->add_option("--output-model", fit.output_model, "Model JSON to write")
      ->required();
  fit_cmd->add_flag("--ransac", fit.ransac, "Robust per-feature fits");
  fit_cmd->add_flag("--normalize-default", fit.normalize_default,
                    "Record normalized scoring as the model default");
  fit_cmd->add_flag("--zscore", fit.zscore, "Standardize features first");
  fit_cmd->add_option("--seed", fit.seed, "Random seed");
  fit_cmd->add_option("--label-col", fit.label_col,
                      "Column excluded from the features");
  fit_cmd->add_option("--anomaly-value", fit.anomaly_value,
                      "Label value marking anomalies");
  fit_cmd->add_option("--ransac-max-iterations", fit.ransac_max_iterations)
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--ransac-threshold", fit.ransac_threshold,
                      "Inlier residual cutoff (default: 1.4826 * MAD)")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--threads", fit.threads);

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score a CSV file");
  score_cmd->add_option("--model", score.model, "Model JSON")->required();
  score_cmd->add_option("--input", score.input, "CSV to score")->required();
  score_cmd->add_flag("--normalize,!--no-normalize", score.normalize,
                      "Override the model's scoring mode");
  score_cmd->add_option("--epsilon", score.epsilon,
                        "Added to |value| in normalized residuals");
  score_cmd->add_option("--threshold-percentile", score.percentile,
                        "Emit -1/1 labels at this score percentile");
  score_cmd->add_option("--attribute-top", score.attribute_top,
                        "Emit the K features with the largest residuals");
  score_cmd->add_option("--label-col", score.label_col,
                        "Column to ignore in the input");
  score_cmd->add_option("--denominator", score.denominator,
                        "observed | counterfactual");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run the benchmark protocol");
  bench_cmd->add_option("--config", bench.config, "Key-value config file");
  bench_cmd->add_option("--dataset", bench.datasets,
                        "Dataset source (repeatable)");
  bench_cmd->add_option("--models", bench.models, "Comma-separated models");
  bench_cmd->add_option("--repeats", bench.repeats);
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--train-fraction", bench.train_fraction);
  bench_cmd->add_option("--metrics", bench.metrics, "roc_auc,pr_auc");
  bench_cmd->add_option("--threads", bench.threads);
  bench_cmd->add_option("--out", bench.out, "Results CSV (long form)");
  bench_cmd->add_option("--markdown", bench.markdown, "Markdown table file");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("--kind", gen.kind);
  gen_cmd->add_option("--n", gen.cfg.n);
  gen_cmd->add_option("--d", gen.cfg.d);
  gen_cmd->add_option("--contamination", gen.cfg.contamination);
  gen_cmd->add_option("--shift", gen.cfg.cluster_shift);
  gen_cmd->add_option("--seed", gen.cfg.seed);
  gen_cmd->add_option("--out", gen.out, "Output CSV (default: stdout)");

  std::vector<const char*> argv{"sam"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return CmdFit(fit, err);
    if (*score_cmd) return CmdScore(score, out, err);
    if (*bench_cmd) return CmdBench(bench, out, err);
    if (*gen_cmd) return CmdGen(gen, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace sam::cli
