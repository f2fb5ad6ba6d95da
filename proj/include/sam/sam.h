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

// Anomaly scoring from per-feature counterfactuals.
//
// Every feature i is treated as a unit whose "untreated" value is synthesized
// from the remaining features:
//
//   S_i = alpha_i + sum_{j != i} beta_ij * X_j        (beta_ii = 0)
//
// Fitting runs one regression per feature (optionally RANSAC-robust). Scoring
// compares each observed value against its counterfactual:
//
//   residual_i = X_i - S_i                            (raw)
//   residual_i = (X_i - S_i) / (|X_i| + epsilon)      (normalized)
//   score      = sum_i |residual_i|
//
// Absolute values are summed so deviations in opposite directions cannot
// cancel. The normalized form divides by the observed magnitude; dividing by
// the counterfactual instead is available through ScoreOptions::denominator.

#ifndef SAM_SAM_H_
#define SAM_SAM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sam/common.h"
#include "sam/dataset.h"
#include "sam/regression.h"

namespace sam {

inline constexpr int kModelFormatVersion = 1;

struct SamVariant {
  bool use_ransac = false;
  bool normalize = false;

  // "sam++", "sam+-", "sam-+", "sam--": first sign is RANSAC, second is
  // normalization.
  std::string Name() const;
  static std::optional<SamVariant> FromName(std::string_view name);
};

struct FeatureFitMeta {
  bool used_ransac = false;
  // False only when RANSAC ran and found no consensus (OLS took over).
  bool converged = true;
  bool degenerate = false;
  bool standardized = false;

  bool operator==(const FeatureFitMeta&) const = default;
};

// Per-feature z-score applied before fitting and scoring.
struct Standardization {
  Vector means;
  Vector scales;
};

struct SamModel {
  // coefficients(i, j) weights feature j in the counterfactual of feature i.
  Matrix coefficients;
  Vector intercepts;
  std::vector<std::string> feature_names;
  std::vector<FeatureFitMeta> fit_meta;
  std::optional<Standardization> standardization;
  // Scoring mode chosen at fit time; callers may override.
  bool default_normalize = false;
  int format_version = kModelFormatVersion;
  std::int64_t created_unix_seconds = 0;

  Eigen::Index dimension() const { return coefficients.rows(); }

  // Throws ModelError on a nonzero diagonal, non-finite entries or
  // inconsistent sizes.
  void Validate() const;
};

struct FitOptions {
  SamVariant variant;
  RansacConfig ransac;
  // Per-feature RANSAC seeds derive from this.
  std::uint64_t seed = 0;
  bool zscore = false;
  // Workers for the per-feature fits (0 = hardware concurrency).
  std::size_t threads = 1;
};

// One regression per feature on all other features. Requires n >= d + 1 and
// d >= 2. RANSAC fits that find no consensus fall back to OLS.
SamModel FitSam(const Dataset& train, const FitOptions& options);
SamModel FitSam(const Matrix& train, std::vector<std::string> feature_names,
                const FitOptions& options);

// S = X * coefficients^T + intercepts, in the model's (possibly standardized)
// space. Cost is Theta(d^2) per row.
Matrix Counterfactual(const SamModel& model, const Matrix& x);

enum class Denominator {
  kObserved,        // |X_i| + epsilon
  kCounterfactual,  // |S_i| + epsilon
};

struct ScoreOptions {
  bool normalize = false;
  double epsilon = 1e-9;
  Denominator denominator = Denominator::kObserved;
};

struct ScoreReport {
  Vector score;
  Matrix residuals;
  Matrix counterfactuals;
  bool normalized = false;
  std::vector<std::string> feature_names;

  Eigen::Index size() const { return score.size(); }
};

ScoreReport Score(const SamModel& model, const Matrix& x,
                  const ScoreOptions& options = {});

// Scores only, without keeping residual or counterfactual matrices beyond a
// fixed-size block of rows. Same values as Score(...).score; used on hot
// paths.
Vector ScoreOnly(const SamModel& model, const Matrix& x,
                 const ScoreOptions& options = {});

// Linear-interpolation quantile (the "linear" method of Hyndman & Fan type 7).
// percentile in [0, 100].
double Percentile(const Vector& values, double percentile);

// -1 where score > the given percentile of the scores, else 1. percentile in
// (0, 100).
std::vector<int> Label(const Vector& scores, double percentile);
inline std::vector<int> Label(const ScoreReport& report, double percentile) {
  return Label(report.score, percentile);
}

struct Attribution {
  std::string feature_name;
  double magnitude = 0.0;
  double share = 0.0;
};

// Features of one point ranked by |residual|, descending. Shares sum to 1 when
// the score is positive and are all 0 otherwise.
std::vector<Attribution> Attribute(const ScoreReport& report,
                                   Eigen::Index point);

// Versioned JSON document.
std::string SerializeModel(const SamModel& model);
SamModel DeserializeModel(std::string_view text);
void SaveModel(const SamModel& model, const std::string& path);
SamModel LoadModel(const std::string& path);

}  // namespace sam

#endif  // SAM_SAM_H_
