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

// Reference detectors: Isolation Forest, Local Outlier Factor and the mean
// k-nearest-neighbor distance. Higher scores are more anomalous for all three.

#ifndef SAM_BASELINES_H_
#define SAM_BASELINES_H_

#include <cstdint>
#include <vector>

#include "sam/common.h"

namespace sam {

// ---------------------------------------------------------------------------
// Isolation Forest
// ---------------------------------------------------------------------------

struct IsolationNode {
  // -1 on leaves.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Training points that reached this node.
  int size = 0;

  bool is_leaf() const { return feature < 0; }
};

struct IsolationTree {
  // nodes[0] is the root.
  std::vector<IsolationNode> nodes;

  int Depth() const;
  // Edges to the reached leaf plus AveragePathLength(leaf size).
  double PathLength(const double* point) const;
};

struct IsolationForestModel {
  std::vector<IsolationTree> trees;
  int subsample_size = 0;
  // AveragePathLength(subsample_size).
  double c_norm = 0.0;
  Eigen::Index dimension = 0;
};

struct IsolationForestOptions {
  int trees = 100;
  int subsample = 256;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// Harmonic number H(i) = 1 + 1/2 + ... + 1/i; exact summation for small i,
// asymptotic expansion beyond.
double HarmonicNumber(double i);

// c(n): average path length of an unsuccessful binary-search-tree lookup among
// n keys. c(0) = c(1) = 0, c(2) = 1, c(n) = 2 H(n-1) - 2 (n-1) / n.
double AveragePathLength(double n);

// Trees over independent subsamples of min(subsample, n) rows drawn without
// replacement, depth-capped at ceil(log2(subsample size)). Each internal node
// splits a random non-constant feature at a uniform point in its range.
// Requires n >= 2.
IsolationForestModel FitIsolationForest(const Matrix& train,
                                        const IsolationForestOptions& options);

// 2^(-mean path length / c_norm), in (0, 1).
Vector IsolationForestScore(const IsolationForestModel& model, const Matrix& x);

// ---------------------------------------------------------------------------
// Neighbor-based detectors (exact brute force)
// ---------------------------------------------------------------------------

// max(1, round(ln n)), halves rounded up. Requires n >= 3.
int DefaultK(Eigen::Index n);

class NeighborIndex {
 public:
  // Requires 1 <= k < training rows.
  NeighborIndex(Matrix points, int k);

  const Matrix& points() const { return points_; }
  int k() const { return k_; }
  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dimension() const { return points_.cols(); }

  struct Neighbor {
    double distance;
    Eigen::Index index;
  };

  // k nearest training points to `query` (ties broken by lower index). When
  // `exclude` is a valid index, that training row is skipped.
  std::vector<Neighbor> Nearest(const double* query,
                                Eigen::Index exclude = -1) const;

 private:
  Matrix points_;
  // Row-major copy of points_ for the distance loops.
  std::vector<double> rows_;
  int k_;
};

// Mean Euclidean distance to the k nearest training points. Queries are
// treated as new points.
Vector KnnScore(const NeighborIndex& index, const Matrix& x);
// Same for the training points themselves, each excluding its own row.
Vector KnnScoreTraining(const NeighborIndex& index);

// Local outlier factor model: k-distance and local reachability density of
// every training point (computed with self excluded).
class LofModel {
 public:
  explicit LofModel(NeighborIndex index);

  const NeighborIndex& index() const { return index_; }
  const Vector& k_distance() const { return k_distance_; }
  const Vector& lrd() const { return lrd_; }

  // Added to the mean reachability distance before inverting, so duplicate
  // points get a finite density.
  static constexpr double kReachFloor = 1e-10;

 private:
  NeighborIndex index_;
  Vector k_distance_;
  Vector lrd_;
};

// LOF_k(x) = mean over the k nearest training points o of lrd(o) / lrd(x),
// with reach-dist(x, o) = max(k-distance(o), d(x, o)).
Vector LofScore(const LofModel& model, const Matrix& x);
Vector LofScoreTraining(const LofModel& model);

}  // namespace sam

#endif  // SAM_BASELINES_H_
