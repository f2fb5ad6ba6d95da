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

#ifndef SAM_REGRESSION_H_
#define SAM_REGRESSION_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "sam/common.h"

namespace sam {

// target ~ predictors * coefficients + intercept.
struct LinearFit {
  Vector coefficients;
  double intercept = 0.0;
  // Consensus set of the winning RANSAC candidate.
  std::optional<std::vector<bool>> inlier_mask;
  bool converged = false;
  // The centered design was rank deficient; the minimum-norm solution was
  // returned.
  bool degenerate = false;

  Vector Predict(const Matrix& predictors) const;
};

struct RansacConfig {
  int max_iterations = 100;
  // Rows per random candidate. Unset means predictors + 1.
  std::optional<int> min_samples;
  // Inlier cutoff on |residual|. Unset means "auto": 1.4826 * MAD(target).
  std::optional<double> residual_threshold;
  double stop_inlier_fraction = 0.99;
  std::uint64_t seed = 0;
};

// Least squares on the mean-centered design, solved by a complete orthogonal
// decomposition; the intercept is recovered from the column means. Requires
// n >= p + 1.
LinearFit OlsFit(const Matrix& predictors, const Vector& target);

// Abstraction over the per-feature regressor. Only OLS ships.
class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual LinearFit Fit(const Matrix& predictors, const Vector& target) const = 0;
};

class OlsRegressor : public Regressor {
 public:
  LinearFit Fit(const Matrix& predictors, const Vector& target) const override {
    return OlsFit(predictors, target);
  }
};

// Random sample consensus around `base` (OLS by default). The final model is
// refit on the best consensus set. converged=false when no candidate reached
// min_samples inliers; the returned coefficients are then the plain `base` fit
// on all rows.
LinearFit RansacFit(const Matrix& predictors, const Vector& target,
                    const RansacConfig& cfg,
                    const Regressor& base = OlsRegressor());

// Threshold RansacFit uses when cfg.residual_threshold is unset:
// 1.4826 * MAD(target), floored at 1e-12 * max(1, max|target|) so that a
// constant target still admits its exact fits.
double AutoResidualThreshold(const Vector& target);

}  // namespace sam

#endif  // SAM_REGRESSION_H_
