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

#include "sam/regression.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sam/random.h"

namespace sam {

namespace {

double Median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(
      v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

Vector LinearFit::Predict(const Matrix& predictors) const {
  return (predictors * coefficients).array() + intercept;
}

LinearFit OlsFit(const Matrix& predictors, const Vector& target) {
  const Eigen::Index n = predictors.rows();
  const Eigen::Index p = predictors.cols();
  if (target.size() != n) {
    throw std::invalid_argument("ols: target has " +
                                std::to_string(target.size()) +
                                " rows, predictors " + std::to_string(n));
  }
  if (n < p + 1) {
    throw std::invalid_argument("ols: need at least " + std::to_string(p + 1) +
                                " rows, got " + std::to_string(n));
  }
  LinearFit fit;
  fit.converged = true;
  const double target_mean = target.mean();
  if (p == 0) {
    fit.coefficients = Vector::Zero(0);
    fit.intercept = target_mean;
    return fit;
  }
  const Eigen::RowVectorXd means = predictors.colwise().mean();
  const Matrix centered = predictors.rowwise() - means;
  const Vector centered_target = target.array() - target_mean;

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(centered);
  fit.coefficients = cod.solve(centered_target);
  fit.degenerate = cod.rank() < p;
  fit.intercept = target_mean - means.dot(fit.coefficients);
  return fit;
}

double AutoResidualThreshold(const Vector& target) {
  std::vector<double> v(target.data(), target.data() + target.size());
  const double median = Median(v);
  for (auto& x : v) x = std::abs(x - median);
  const double mad = Median(std::move(v));
  const double floor =
      1e-12 * std::max(1.0, target.cwiseAbs().maxCoeff());
  return std::max(1.4826 * mad, floor);
}

LinearFit RansacFit(const Matrix& predictors, const Vector& target,
                    const RansacConfig& cfg, const Regressor& base) {
  const Eigen::Index n = predictors.rows();
  const Eigen::Index p = predictors.cols();
  const int min_samples = cfg.min_samples.value_or(static_cast<int>(p) + 1);
  if (min_samples < p + 1) {
    throw std::invalid_argument("ransac: min_samples must be at least " +
                                std::to_string(p + 1));
  }
  if (cfg.max_iterations < 1) {
    throw std::invalid_argument("ransac: max_iterations must be positive");
  }
  if (!(cfg.stop_inlier_fraction > 0.0 && cfg.stop_inlier_fraction <= 1.0)) {
    throw std::invalid_argument("ransac: stop_inlier_fraction must be in (0, 1]");
  }
  if (cfg.residual_threshold && !(*cfg.residual_threshold > 0.0)) {
    throw std::invalid_argument("ransac: residual_threshold must be positive");
  }
  if (n < min_samples) {
    throw std::invalid_argument("ransac: need at least " +
                                std::to_string(min_samples) + " rows, got " +
                                std::to_string(n));
  }
  if (target.size() != n) {
    throw std::invalid_argument("ransac: target/predictor row mismatch");
  }
  const double threshold =
      cfg.residual_threshold.value_or(AutoResidualThreshold(target));

  Rng rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  Matrix sample_x(min_samples, p);
  Vector sample_y(min_samples);
  std::vector<bool> best_mask;
  Eigen::Index best_count = 0;
  const double stop_count =
      cfg.stop_inlier_fraction * static_cast<double>(n);

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    // Partial Fisher-Yates: the first min_samples slots become a uniform
    // sample without replacement.
    for (int s = 0; s < min_samples; ++s) {
      const auto j = static_cast<std::size_t>(
          s + static_cast<Eigen::Index>(
                  rng.Below(static_cast<std::uint64_t>(n - s))));
      std::swap(order[static_cast<std::size_t>(s)], order[j]);
      sample_x.row(s) = predictors.row(order[static_cast<std::size_t>(s)]);
      sample_y(s) = target(order[static_cast<std::size_t>(s)]);
    }
    const LinearFit candidate = base.Fit(sample_x, sample_y);
    const Vector residual = target - candidate.Predict(predictors);
    Eigen::Index count = 0;
    std::vector<bool> mask(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool inlier = std::abs(residual(i)) <= threshold;
      mask[static_cast<std::size_t>(i)] = inlier;
      count += inlier;
    }
    if (count > best_count) {
      best_count = count;
      best_mask = std::move(mask);
    }
    if (static_cast<double>(best_count) >= stop_count) break;
  }

  if (best_count < min_samples) {
    LinearFit fallback = base.Fit(predictors, target);
    fallback.converged = false;
    fallback.inlier_mask.reset();
    return fallback;
  }
  Matrix consensus_x(best_count, p);
  Vector consensus_y(best_count);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!best_mask[static_cast<std::size_t>(i)]) continue;
    consensus_x.row(row) = predictors.row(i);
    consensus_y(row) = target(i);
    ++row;
  }
  LinearFit fit = base.Fit(consensus_x, consensus_y);
  fit.converged = true;
  fit.inlier_mask = std::move(best_mask);
  return fit;
}

}  // namespace sam
