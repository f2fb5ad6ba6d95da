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

#include "sam/detector.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sam/baselines.h"
#include "sam/dataset.h"

namespace sam {

ModelSpec ModelSpec::Parse(std::string_view text) {
  ModelSpec spec;
  if (const auto variant = SamVariant::FromName(text)) {
    spec.kind = DetectorKind::kSam;
    spec.variant = *variant;
  } else if (text == "iforest") {
    spec.kind = DetectorKind::kIsolationForest;
  } else if (text == "lof") {
    spec.kind = DetectorKind::kLof;
  } else if (text == "knn") {
    spec.kind = DetectorKind::kKnn;
  } else if (text.starts_with("external:")) {
    const std::string_view rest = text.substr(9);
    const auto eq = rest.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == rest.size()) {
      throw std::invalid_argument("model spec '" + std::string(text) +
                                  "': expected external:<label>=<path>");
    }
    spec.kind = DetectorKind::kExternal;
    spec.label = std::string(rest.substr(0, eq));
    spec.scores_path = std::string(rest.substr(eq + 1));
    return spec;
  } else {
    throw std::invalid_argument("unknown model '" + std::string(text) + "'");
  }
  spec.label = std::string(text);
  return spec;
}

ExternalScores LoadExternalScores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("external scores: cannot open '" + path + "'");
  ExternalScores scores;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with("fingerprint")) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("external scores: line " + std::to_string(line_no) +
                      " has no comma");
    }
    std::uint64_t fp = 0;
    double score = 0.0;
    const char* key_end = line.data() + comma;
    const auto k = std::from_chars(line.data(), key_end, fp, 16);
    const auto v = std::from_chars(line.data() + comma + 1,
                                   line.data() + line.size(), score);
    if (k.ec != std::errc() || k.ptr != key_end || v.ec != std::errc() ||
        v.ptr != line.data() + line.size()) {
      throw DataError("external scores: cannot parse line " +
                      std::to_string(line_no) + " of '" + path + "'");
    }
    scores[fp] = score;
  }
  return scores;
}

namespace {

class SamDetector : public Detector {
 public:
  SamDetector(const ModelSpec& spec, std::uint64_t seed)
      : spec_(spec), seed_(seed) {}

  void Fit(const Matrix& train) override {
    FitOptions options;
    options.variant = spec_.variant;
    options.ransac = spec_.ransac;
    options.seed = seed_;
    options.zscore = spec_.zscore;
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < train.cols(); ++j) {
      names.push_back("x" + std::to_string(j + 1));
    }
    model_ = FitSam(train, std::move(names), options);
  }

  Vector Score(const Matrix& x) const override {
    if (!model_) throw std::logic_error("sam detector used before Fit");
    ScoreOptions options;
    options.normalize = spec_.variant.normalize;
    options.epsilon = spec_.epsilon;
    return ScoreOnly(*model_, x, options);
  }

 private:
  ModelSpec spec_;
  std::uint64_t seed_;
  std::optional<SamModel> model_;
};

class IsolationForestDetector : public Detector {
 public:
  IsolationForestDetector(const ModelSpec& spec, std::uint64_t seed)
      : spec_(spec), seed_(seed) {}

  void Fit(const Matrix& train) override {
    IsolationForestOptions options;
    options.trees = spec_.trees;
    options.subsample = spec_.subsample;
    options.seed = seed_;
    model_ = FitIsolationForest(train, options);
  }

  Vector Score(const Matrix& x) const override {
    if (!model_) throw std::logic_error("iforest detector used before Fit");
    return IsolationForestScore(*model_, x);
  }

 private:
  ModelSpec spec_;
  std::uint64_t seed_;
  std::optional<IsolationForestModel> model_;
};

class KnnDetector : public Detector {
 public:
  explicit KnnDetector(const ModelSpec& spec) : spec_(spec) {}

  void Fit(const Matrix& train) override {
    index_.emplace(train, spec_.k.value_or(DefaultK(train.rows())));
  }

  Vector Score(const Matrix& x) const override {
    if (!index_) throw std::logic_error("knn detector used before Fit");
    return KnnScore(*index_, x);
  }

 private:
  ModelSpec spec_;
  std::optional<NeighborIndex> index_;
};

class LofDetector : public Detector {
 public:
  explicit LofDetector(const ModelSpec& spec) : spec_(spec) {}

  void Fit(const Matrix& train) override {
    model_.emplace(
        NeighborIndex(train, spec_.k.value_or(DefaultK(train.rows()))));
  }

  Vector Score(const Matrix& x) const override {
    if (!model_) throw std::logic_error("lof detector used before Fit");
    return LofScore(*model_, x);
  }

 private:
  ModelSpec spec_;
  std::optional<LofModel> model_;
};

class ExternalDetector : public Detector {
 public:
  explicit ExternalDetector(std::shared_ptr<const ExternalScores> scores)
      : scores_(std::move(scores)) {}

  void Fit(const Matrix&) override {}

  Vector Score(const Matrix& x) const override {
    Vector out(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const std::uint64_t fp = RowFingerprint(x, r);
      const auto it = scores_->find(fp);
      if (it == scores_->end()) {
        throw DataError("no external score for row fingerprint " +
                        FingerprintHex(fp));
      }
      out(r) = it->second;
    }
    return out;
  }

 private:
  std::shared_ptr<const ExternalScores> scores_;
};

}  // namespace

std::unique_ptr<Detector> MakeDetector(
    const ModelSpec& spec, std::uint64_t seed,
    std::shared_ptr<const ExternalScores> external) {
  switch (spec.kind) {
    case DetectorKind::kSam:
      return std::make_unique<SamDetector>(spec, seed);
    case DetectorKind::kIsolationForest:
      return std::make_unique<IsolationForestDetector>(spec, seed);
    case DetectorKind::kLof:
      return std::make_unique<LofDetector>(spec);
    case DetectorKind::kKnn:
      return std::make_unique<KnnDetector>(spec);
    case DetectorKind::kExternal:
      if (!external) {
        external = std::make_shared<const ExternalScores>(
            LoadExternalScores(spec.scores_path));
      }
      return std::make_unique<ExternalDetector>(std::move(external));
  }
  throw std::logic_error("unhandled detector kind");
}

DetectorResult Detect(const Detector& detector, const Matrix& x,
                      std::optional<double> percentile) {
  DetectorResult result;
  result.scores = detector.Score(x);
  if (percentile) result.labels = Label(result.scores, *percentile);
  return result;
}

}  // namespace sam
