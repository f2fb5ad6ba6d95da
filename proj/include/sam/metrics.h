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

// Threshold-free evaluation. Labels use true = anomaly (positive class) and
// higher scores mean "more anomalous".

#ifndef SAM_METRICS_H_
#define SAM_METRICS_H_

#include <span>
#include <string>
#include <vector>

namespace sam {

// Probability that a random anomaly outscores a random normal point, ties
// counted 1/2. Computed from average ranks in O(n log n). Throws
// std::invalid_argument unless both classes are present.
double RocAuc(std::span<const double> scores, const std::vector<bool>& labels);

// Average precision: sum over distinct thresholds (descending) of
// delta-recall * precision, tied scores entering as one block. Throws
// std::invalid_argument when there is no anomaly.
double PrAuc(std::span<const double> scores, const std::vector<bool>& labels);

enum class CurveKind { kRoc, kPr };

struct CurvePoint {
  // +infinity for the leading endpoint.
  double threshold;
  // ROC: false positive rate; PR: recall.
  double x;
  // ROC: true positive rate; PR: precision.
  double y;
};

struct CurvePoints {
  CurveKind kind = CurveKind::kRoc;
  std::vector<CurvePoint> points;
  double auc = 0.0;
};

// One point per distinct score (descending) plus the leading endpoint: (0, 0)
// for ROC, (0, 1) for PR. ROC area is trapezoidal and PR area is step-wise, so
// auc equals RocAuc / PrAuc.
CurvePoints ComputeCurve(std::span<const double> scores,
                         const std::vector<bool>& labels, CurveKind kind);

// "threshold,x,y" rows under a header.
std::string CurveToCsv(const CurvePoints& curve);

struct RankTable {
  // Rank of model j on dataset i (1 = best, ties share the average rank).
  std::vector<std::vector<double>> ranks;
  std::vector<double> average_ranks;
  double friedman_statistic = 0.0;
  // Upper chi-square tail with n_models - 1 degrees of freedom.
  double p_value = 1.0;
  int n_models = 0;
  int n_datasets = 0;
};

// values[i][j] = metric of model j on dataset i; larger is better. Requires at
// least 2 models and 2 datasets with no missing (NaN) cells.
RankTable Friedman(const std::vector<std::vector<double>>& values);

// Regularized upper incomplete gamma Q(a, x), series for x < a + 1 and a
// continued fraction otherwise.
double RegularizedGammaQ(double a, double x);
double ChiSquareSurvival(double statistic, double dof);

}  // namespace sam

#endif  // SAM_METRICS_H_
