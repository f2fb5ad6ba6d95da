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

#include "sam/sam.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sam/random.h"

namespace sam {

std::string SamVariant::Name() const {
  std::string name = "sam";
  name += use_ransac ? '+' : '-';
  name += normalize ? '+' : '-';
  return name;
}

std::optional<SamVariant> SamVariant::FromName(std::string_view name) {
  if (name.size() != 5 || name.substr(0, 3) != "sam") return std::nullopt;
  const auto sign = [](char c) -> std::optional<bool> {
    if (c == '+') return true;
    if (c == '-') return false;
    return std::nullopt;
  };
  const auto ransac = sign(name[3]);
  const auto normalize = sign(name[4]);
  if (!ransac || !normalize) return std::nullopt;
  return SamVariant{*ransac, *normalize};
}

void SamModel::Validate() const {
  const Eigen::Index d = coefficients.rows();
  if (coefficients.cols() != d) {
    throw ModelError("model: coefficient matrix is not square");
  }
  if (intercepts.size() != d) {
    throw ModelError("model: " + std::to_string(intercepts.size()) +
                     " intercepts for dimension " + std::to_string(d));
  }
  if (static_cast<Eigen::Index>(feature_names.size()) != d) {
    throw ModelError("model: " + std::to_string(feature_names.size()) +
                     " feature names for dimension " + std::to_string(d));
  }
  if (static_cast<Eigen::Index>(fit_meta.size()) != d) {
    throw ModelError("model: " + std::to_string(fit_meta.size()) +
                     " fit_meta records for dimension " + std::to_string(d));
  }
  if (!coefficients.allFinite() || !intercepts.allFinite()) {
    throw ModelError("model: non-finite coefficient or intercept");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (coefficients(i, i) != 0.0) {
      throw ModelError("model: nonzero diagonal at feature " +
                       std::to_string(i) + " ('" + feature_names[i] + "')");
    }
  }
  if (standardization) {
    if (standardization->means.size() != d ||
        standardization->scales.size() != d) {
      throw ModelError("model: standardization size mismatch");
    }
    if (!standardization->means.allFinite() ||
        !standardization->scales.allFinite()) {
      throw ModelError("model: non-finite standardization");
    }
    if ((standardization->scales.array() <= 0.0).any()) {
      throw ModelError("model: standardization scales must be positive");
    }
  }
}

namespace {

Matrix WithoutColumn(const Matrix& x, Eigen::Index skip) {
  const Eigen::Index d = x.cols();
  Matrix out(x.rows(), d - 1);
  if (skip > 0) out.leftCols(skip) = x.leftCols(skip);
  if (skip < d - 1) out.rightCols(d - 1 - skip) = x.rightCols(d - 1 - skip);
  return out;
}

Standardization ComputeStandardization(const Matrix& x) {
  Standardization z;
  z.means = x.colwise().mean().transpose();
  z.scales.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var =
        (x.col(j).array() - z.means(j)).square().sum() /
        static_cast<double>(x.rows());
    const double sd = std::sqrt(var);
    z.scales(j) = sd > 0.0 ? sd : 1.0;
  }
  return z;
}

Matrix ApplyStandardization(const Standardization& z, const Matrix& x) {
  return (x.rowwise() - z.means.transpose()).array().rowwise() /
         z.scales.transpose().array();
}

void CheckDimension(const SamModel& model, const Matrix& x) {
  if (x.cols() != model.dimension()) {
    throw std::invalid_argument("sam: input has " + std::to_string(x.cols()) +
                                " columns, model expects " +
                                std::to_string(model.dimension()));
  }
}

}  // namespace

SamModel FitSam(const Matrix& train, std::vector<std::string> feature_names,
                const FitOptions& options) {
  const Eigen::Index n = train.rows();
  const Eigen::Index d = train.cols();
  if (d < 2) {
    throw std::invalid_argument("sam: need at least 2 features, got " +
                                std::to_string(d));
  }
  if (n < d + 1) {
    throw std::invalid_argument("sam: need at least " + std::to_string(d + 1) +
                                " training rows, got " + std::to_string(n));
  }
  if (static_cast<Eigen::Index>(feature_names.size()) != d) {
    throw std::invalid_argument("sam: feature name count mismatch");
  }

  SamModel model;
  model.coefficients = Matrix::Zero(d, d);
  model.intercepts = Vector::Zero(d);
  model.feature_names = std::move(feature_names);
  model.fit_meta.assign(static_cast<std::size_t>(d), FeatureFitMeta{});
  model.default_normalize = options.variant.normalize;

  Matrix fitted;
  if (options.zscore) {
    model.standardization = ComputeStandardization(train);
    fitted = ApplyStandardization(*model.standardization, train);
  }
  const Matrix& x = options.zscore ? fitted : train;

  std::vector<LinearFit> fits(static_cast<std::size_t>(d));
  ParallelFor(static_cast<std::size_t>(d), options.threads,
              [&](std::size_t i) {
                const auto col = static_cast<Eigen::Index>(i);
                const Matrix predictors = WithoutColumn(x, col);
                const Vector target = x.col(col);
                FeatureFitMeta& meta = model.fit_meta[i];
                meta.standardized = options.zscore;
                if (options.variant.use_ransac) {
                  meta.used_ransac = true;
                  RansacConfig cfg = options.ransac;
                  cfg.seed = MixSeed(options.seed, i);
                  LinearFit fit = RansacFit(predictors, target, cfg);
                  meta.converged = fit.converged;
                  if (!fit.converged) fit = OlsFit(predictors, target);
                  fits[i] = std::move(fit);
                } else {
                  fits[i] = OlsFit(predictors, target);
                }
                meta.degenerate = fits[i].degenerate;
              });

  for (Eigen::Index i = 0; i < d; ++i) {
    const LinearFit& fit = fits[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0, k = 0; j < d; ++j) {
      if (j == i) continue;
      model.coefficients(i, j) = fit.coefficients(k++);
    }
    model.intercepts(i) = fit.intercept;
  }
  model.Validate();
  return model;
}

SamModel FitSam(const Dataset& train, const FitOptions& options) {
  return FitSam(train.values(), train.feature_names(), options);
}

Matrix Counterfactual(const SamModel& model, const Matrix& x) {
  CheckDimension(model, x);
  if (model.standardization) {
    const Matrix z = ApplyStandardization(*model.standardization, x);
    return (z * model.coefficients.transpose()).rowwise() +
           model.intercepts.transpose();
  }
  return (x * model.coefficients.transpose()).rowwise() +
         model.intercepts.transpose();
}

ScoreReport Score(const SamModel& model, const Matrix& x,
                  const ScoreOptions& options) {
  CheckDimension(model, x);
  if (!(options.epsilon > 0.0)) {
    throw std::invalid_argument("sam: epsilon must be positive");
  }
  ScoreReport report;
  report.feature_names = model.feature_names;
  report.normalized = options.normalize;
  report.counterfactuals = Counterfactual(model, x);
  const Matrix observed = model.standardization
                              ? ApplyStandardization(*model.standardization, x)
                              : x;
  report.residuals = observed - report.counterfactuals;
  if (options.normalize) {
    const Matrix& base = options.denominator == Denominator::kObserved
                             ? observed
                             : report.counterfactuals;
    report.residuals.array() /= base.array().abs() + options.epsilon;
  }
  report.score = report.residuals.cwiseAbs().rowwise().sum();
  return report;
}

Vector ScoreOnly(const SamModel& model, const Matrix& x,
                 const ScoreOptions& options) {
  CheckDimension(model, x);
  if (!(options.epsilon > 0.0)) {
    throw std::invalid_argument("sam: epsilon must be positive");
  }
  // Rows are scored in blocks so the counterfactuals come from one matrix
  // product per block.
  constexpr Eigen::Index kBlock = 256;
  const Matrix weights = model.coefficients.transpose();
  Vector scores(x.rows());
  Matrix block, cf;
  for (Eigen::Index r0 = 0; r0 < x.rows(); r0 += kBlock) {
    const Eigen::Index rows = std::min(kBlock, x.rows() - r0);
    block = x.middleRows(r0, rows);
    if (model.standardization) {
      block.rowwise() -= model.standardization->means.transpose();
      block.array().rowwise() /=
          model.standardization->scales.transpose().array();
    }
    cf.noalias() = block * weights;
    cf.rowwise() += model.intercepts.transpose();
    if (!options.normalize) {
      scores.segment(r0, rows) = (block - cf).cwiseAbs().rowwise().sum();
      continue;
    }
    const Matrix& base =
        options.denominator == Denominator::kObserved ? block : cf;
    scores.segment(r0, rows) =
        ((block - cf).array().abs() / (base.array().abs() + options.epsilon))
            .rowwise()
            .sum();
  }
  return scores;
}

double Percentile(const Vector& values, double percentile) {
  if (values.size() == 0) {
    throw std::invalid_argument("percentile: empty input");
  }
  if (!(percentile >= 0.0 && percentile <= 100.0)) {
    throw std::invalid_argument("percentile must be in [0, 100]");
  }
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double h =
      static_cast<double>(sorted.size() - 1) * percentile / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<int> Label(const Vector& scores, double percentile) {
  if (!(percentile > 0.0 && percentile < 100.0)) {
    throw std::invalid_argument("label: percentile must be in (0, 100)");
  }
  if (scores.size() == 0) throw std::invalid_argument("label: no scores");
  const double tau = Percentile(scores, percentile);
  std::vector<int> labels(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    labels[static_cast<std::size_t>(i)] = scores(i) > tau ? -1 : 1;
  }
  return labels;
}

std::vector<Attribution> Attribute(const ScoreReport& report,
                                   Eigen::Index point) {
  if (point < 0 || point >= report.size()) {
    throw std::out_of_range("attribute: point index " + std::to_string(point) +
                            " out of range [0, " +
                            std::to_string(report.size()) + ")");
  }
  const double score = report.score(point);
  std::vector<Attribution> out;
  out.reserve(report.feature_names.size());
  for (Eigen::Index j = 0; j < report.residuals.cols(); ++j) {
    const double magnitude = std::abs(report.residuals(point, j));
    out.push_back({report.feature_names[static_cast<std::size_t>(j)],
                   magnitude, score > 0.0 ? magnitude / score : 0.0});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Attribution& a, const Attribution& b) {
                     return a.magnitude > b.magnitude;
                   });
  return out;
}

}  // namespace sam
