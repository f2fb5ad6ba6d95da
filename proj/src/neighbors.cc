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

#include <algorithm>
#include <cmath>
#include <string>

#include "sam/baselines.h"

namespace sam {

int DefaultK(Eigen::Index n) {
  if (n < 3) {
    throw std::invalid_argument("default_k: need n >= 3, got " +
                                std::to_string(n));
  }
  const double k = std::floor(std::log(static_cast<double>(n)) + 0.5);
  return std::max(1, static_cast<int>(k));
}

NeighborIndex::NeighborIndex(Matrix points, int k)
    : points_(std::move(points)), k_(k) {
  if (k_ < 1 || k_ >= points_.rows()) {
    throw std::invalid_argument("neighbors: k=" + std::to_string(k_) +
                                " must be in [1, " +
                                std::to_string(points_.rows()) + ")");
  }
  const Eigen::Index n = points_.rows();
  const Eigen::Index d = points_.cols();
  rows_.resize(static_cast<std::size_t>(n * d));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      rows_[static_cast<std::size_t>(i * d + j)] = points_(i, j);
    }
  }
}

std::vector<NeighborIndex::Neighbor> NeighborIndex::Nearest(
    const double* query, Eigen::Index exclude) const {
  const Eigen::Index n = points_.rows();
  const Eigen::Index d = points_.cols();
  const auto k = static_cast<std::size_t>(k_);
  // Sorted by (squared distance, index); indices are scanned in increasing
  // order so strict comparison keeps the lower index on ties.
  std::vector<Neighbor> best;
  best.reserve(k + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == exclude) continue;
    const double* row = rows_.data() + i * d;
    double sq = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double diff = query[j] - row[j];
      sq += diff * diff;
    }
    if (best.size() == k && !(sq < best.back().distance)) continue;
    auto pos = std::upper_bound(
        best.begin(), best.end(), sq,
        [](double value, const Neighbor& nb) { return value < nb.distance; });
    best.insert(pos, Neighbor{sq, i});
    if (best.size() > k) best.pop_back();
  }
  for (auto& nb : best) nb.distance = std::sqrt(nb.distance);
  return best;
}

namespace {

std::vector<double> RowOf(const Matrix& x, Eigen::Index r) {
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    row[static_cast<std::size_t>(j)] = x(r, j);
  }
  return row;
}

double MeanDistance(const std::vector<NeighborIndex::Neighbor>& nbs) {
  double sum = 0.0;
  for (const auto& nb : nbs) sum += nb.distance;
  return sum / static_cast<double>(nbs.size());
}

void CheckQueryDimension(const NeighborIndex& index, const Matrix& x) {
  if (x.cols() != index.dimension()) {
    throw std::invalid_argument("neighbors: input has " +
                                std::to_string(x.cols()) +
                                " columns, index has " +
                                std::to_string(index.dimension()));
  }
}

}  // namespace

Vector KnnScore(const NeighborIndex& index, const Matrix& x) {
  CheckQueryDimension(index, x);
  Vector scores(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const auto row = RowOf(x, r);
    scores(r) = MeanDistance(index.Nearest(row.data()));
  }
  return scores;
}

Vector KnnScoreTraining(const NeighborIndex& index) {
  Vector scores(index.size());
  for (Eigen::Index r = 0; r < index.size(); ++r) {
    const auto row = RowOf(index.points(), r);
    scores(r) = MeanDistance(index.Nearest(row.data(), r));
  }
  return scores;
}

namespace {

double LocalReachabilityDensity(
    const std::vector<NeighborIndex::Neighbor>& nbs, const Vector& k_distance) {
  double reach = 0.0;
  for (const auto& nb : nbs) {
    reach += std::max(k_distance(nb.index), nb.distance);
  }
  reach /= static_cast<double>(nbs.size());
  return 1.0 / (reach + LofModel::kReachFloor);
}

double LocalOutlierFactor(const std::vector<NeighborIndex::Neighbor>& nbs,
                          const Vector& k_distance, const Vector& lrd) {
  const double own = LocalReachabilityDensity(nbs, k_distance);
  double ratio = 0.0;
  for (const auto& nb : nbs) ratio += lrd(nb.index) / own;
  return ratio / static_cast<double>(nbs.size());
}

}  // namespace

LofModel::LofModel(NeighborIndex index) : index_(std::move(index)) {
  const Eigen::Index n = index_.size();
  std::vector<std::vector<NeighborIndex::Neighbor>> neighbors(
      static_cast<std::size_t>(n));
  k_distance_.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto row = RowOf(index_.points(), r);
    auto nbs = index_.Nearest(row.data(), r);
    k_distance_(r) = nbs.back().distance;
    neighbors[static_cast<std::size_t>(r)] = std::move(nbs);
  }
  lrd_.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    lrd_(r) = LocalReachabilityDensity(neighbors[static_cast<std::size_t>(r)],
                                       k_distance_);
  }
}

Vector LofScore(const LofModel& model, const Matrix& x) {
  CheckQueryDimension(model.index(), x);
  Vector scores(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const auto row = RowOf(x, r);
    scores(r) = LocalOutlierFactor(model.index().Nearest(row.data()),
                                   model.k_distance(), model.lrd());
  }
  return scores;
}

Vector LofScoreTraining(const LofModel& model) {
  const NeighborIndex& index = model.index();
  Vector scores(index.size());
  for (Eigen::Index r = 0; r < index.size(); ++r) {
    const auto row = RowOf(index.points(), r);
    scores(r) = LocalOutlierFactor(index.Nearest(row.data(), r),
                                   model.k_distance(), model.lrd());
  }
  return scores;
}

}  // namespace sam
