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

#include "sam/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sam {

namespace {

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

ClassCounts CheckInputs(std::span<const double> scores,
                        const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("metrics: " + std::to_string(scores.size()) +
                                " scores for " +
                                std::to_string(labels.size()) + " labels");
  }
  ClassCounts c;
  for (bool l : labels) (l ? c.positives : c.negatives)++;
  for (double s : scores) {
    if (std::isnan(s)) throw std::invalid_argument("metrics: NaN score");
  }
  return c;
}

// Indices sorted by descending score (stable).
std::vector<std::size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

// Cumulative (tp, fp) after each block of tied scores, highest first.
struct Step {
  double threshold;
  std::size_t tp;
  std::size_t fp;
};

std::vector<Step> Sweep(std::span<const double> scores,
                        const std::vector<bool>& labels) {
  const auto order = DescendingOrder(scores);
  std::vector<Step> steps;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] ? tp : fp)++;
      ++i;
    }
    steps.push_back({threshold, tp, fp});
  }
  return steps;
}

}  // namespace

double RocAuc(std::span<const double> scores, const std::vector<bool>& labels) {
  const ClassCounts c = CheckInputs(scores, labels);
  if (c.positives == 0 || c.negatives == 0) {
    throw std::invalid_argument("roc_auc: both classes must be present");
  }
  // Ascending ranks (1-based), tied blocks share their average rank.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t block_positives = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      block_positives += labels[order[j]];
      ++j;
    }
    const double average_rank = 0.5 * static_cast<double>(i + 1 + j);
    positive_rank_sum += average_rank * static_cast<double>(block_positives);
    i = j;
  }
  const auto p = static_cast<double>(c.positives);
  const auto n = static_cast<double>(c.negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

double PrAuc(std::span<const double> scores, const std::vector<bool>& labels) {
  const ClassCounts c = CheckInputs(scores, labels);
  if (c.positives == 0) {
    throw std::invalid_argument("pr_auc: no anomalies in labels");
  }
  const auto p = static_cast<double>(c.positives);
  double ap = 0.0;
  std::size_t previous_tp = 0;
  for (const Step& s : Sweep(scores, labels)) {
    if (s.tp == previous_tp) continue;
    const double precision =
        static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    ap += static_cast<double>(s.tp - previous_tp) / p * precision;
    previous_tp = s.tp;
  }
  return ap;
}

CurvePoints ComputeCurve(std::span<const double> scores,
                         const std::vector<bool>& labels, CurveKind kind) {
  const ClassCounts c = CheckInputs(scores, labels);
  if (c.positives == 0 || c.negatives == 0) {
    throw std::invalid_argument("curve: both classes must be present");
  }
  const auto p = static_cast<double>(c.positives);
  const auto n = static_cast<double>(c.negatives);
  const double inf = std::numeric_limits<double>::infinity();
  CurvePoints curve;
  curve.kind = kind;
  if (kind == CurveKind::kRoc) {
    curve.points.push_back({inf, 0.0, 0.0});
    for (const Step& s : Sweep(scores, labels)) {
      const CurvePoint& prev = curve.points.back();
      const CurvePoint next{s.threshold, static_cast<double>(s.fp) / n,
                            static_cast<double>(s.tp) / p};
      curve.auc += (next.x - prev.x) * (next.y + prev.y) / 2.0;
      curve.points.push_back(next);
    }
  } else {
    curve.points.push_back({inf, 0.0, 1.0});
    std::size_t previous_tp = 0;
    for (const Step& s : Sweep(scores, labels)) {
      const CurvePoint next{
          s.threshold, static_cast<double>(s.tp) / p,
          static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp)};
      curve.auc += static_cast<double>(s.tp - previous_tp) / p * next.y;
      previous_tp = s.tp;
      curve.points.push_back(next);
    }
  }
  return curve;
}

std::string CurveToCsv(const CurvePoints& curve) {
  std::string out = "threshold,x,y\n";
  char buf[96];
  for (const auto& pt : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", pt.threshold, pt.x,
                  pt.y);
    out += buf;
  }
  return out;
}

RankTable Friedman(const std::vector<std::vector<double>>& values) {
  const std::size_t datasets = values.size();
  if (datasets < 2) throw std::invalid_argument("friedman: need >= 2 datasets");
  const std::size_t models = values.front().size();
  if (models < 2) throw std::invalid_argument("friedman: need >= 2 models");
  RankTable table;
  table.n_models = static_cast<int>(models);
  table.n_datasets = static_cast<int>(datasets);
  table.average_ranks.assign(models, 0.0);
  for (std::size_t i = 0; i < datasets; ++i) {
    const auto& row = values[i];
    if (row.size() != models) {
      throw std::invalid_argument("friedman: dataset " + std::to_string(i) +
                                  " has " + std::to_string(row.size()) +
                                  " cells, expected " + std::to_string(models));
    }
    for (std::size_t j = 0; j < models; ++j) {
      if (std::isnan(row[j])) {
        throw std::invalid_argument("friedman: missing cell at dataset " +
                                    std::to_string(i) + ", model " +
                                    std::to_string(j));
      }
    }
    std::vector<std::size_t> order(models);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    std::vector<double> ranks(models);
    for (std::size_t a = 0; a < models;) {
      std::size_t b = a;
      while (b < models && row[order[b]] == row[order[a]]) ++b;
      const double average = 0.5 * static_cast<double>(a + 1 + b);
      for (std::size_t t = a; t < b; ++t) ranks[order[t]] = average;
      a = b;
    }
    for (std::size_t j = 0; j < models; ++j) table.average_ranks[j] += ranks[j];
    table.ranks.push_back(std::move(ranks));
  }
  const auto m = static_cast<double>(models);
  const auto d = static_cast<double>(datasets);
  double spread = 0.0;
  for (double& r : table.average_ranks) {
    r /= d;
    spread += (r - (m + 1.0) / 2.0) * (r - (m + 1.0) / 2.0);
  }
  table.friedman_statistic = 12.0 * d / (m * (m + 1.0)) * spread;
  table.p_value = ChiSquareSurvival(table.friedman_statistic, m - 1.0);
  return table;
}

double RegularizedGammaQ(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw std::invalid_argument("gamma_q: need a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  constexpr int kMaxIterations = 1000;
  constexpr double kTolerance = 1e-16;
  const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // P(a, x) = x^a e^-x / Gamma(a + 1) * sum_k x^k / ((a+1)...(a+k)).
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < kMaxIterations; ++k) {
      term *= x / (a + k);
      sum += term;
      if (std::abs(term) < std::abs(sum) * kTolerance) break;
    }
    return 1.0 - sum * std::exp(log_prefactor);
  }
  // Modified Lentz evaluation of the continued fraction for Q(a, x).
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double dd = 1.0 / b;
  double h = dd;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    dd = an * dd + b;
    if (std::abs(dd) < kTiny) dd = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    dd = 1.0 / dd;
    const double delta = dd * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kTolerance) break;
  }
  return std::exp(log_prefactor) * h;
}

double ChiSquareSurvival(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return RegularizedGammaQ(dof / 2.0, statistic / 2.0);
}

}  // namespace sam
