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

// Uniform fit/score interface over SAM, the baselines and precomputed score
// files.

#ifndef SAM_DETECTOR_H_
#define SAM_DETECTOR_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sam/common.h"
#include "sam/regression.h"
#include "sam/sam.h"

namespace sam {

enum class DetectorKind { kSam, kIsolationForest, kLof, kKnn, kExternal };

struct ModelSpec {
  DetectorKind kind = DetectorKind::kSam;
  // Row label in result tables; also seeds the detector's random stream.
  std::string label;

  // SAM
  SamVariant variant;
  RansacConfig ransac;
  double epsilon = 1e-9;
  bool zscore = false;

  // Isolation Forest
  int trees = 100;
  int subsample = 256;

  // LOF / kNN. Unset means DefaultK(training rows).
  std::optional<int> k;

  // External: CSV with columns "fingerprint,score".
  std::string scores_path;

  // Parses "sam++", "sam+-", "sam-+", "sam--", "iforest", "lof", "knn" or
  // "external:<label>=<path>". Tunables keep their defaults. Throws
  // std::invalid_argument on anything else.
  static ModelSpec Parse(std::string_view text);
};

// Score lookup keyed by RowFingerprint.
using ExternalScores = std::unordered_map<std::uint64_t, double>;
ExternalScores LoadExternalScores(const std::string& path);

class Detector {
 public:
  virtual ~Detector() = default;
  virtual void Fit(const Matrix& train) = 0;
  // Higher = more anomalous.
  virtual Vector Score(const Matrix& x) const = 0;
};

struct DetectorResult {
  Vector scores;
  // -1 anomaly / 1 normal; empty unless a percentile was requested.
  std::vector<int> labels;
};

// `external` must be supplied for DetectorKind::kExternal.
std::unique_ptr<Detector> MakeDetector(
    const ModelSpec& spec, std::uint64_t seed,
    std::shared_ptr<const ExternalScores> external = nullptr);

DetectorResult Detect(const Detector& detector, const Matrix& x,
                      std::optional<double> percentile = std::nullopt);

}  // namespace sam

#endif  // SAM_DETECTOR_H_
