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
#include "sam/baselines.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "sam/random.h"

namespace sam {
namespace {

Matrix Column(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

// Independent O(n^2) LOF over the training set, self excluded, ties to the
// lower index.
std::vector<double> BruteLof(const Matrix& x, int k) {
  const auto n = static_cast<int>(x.rows());
  auto dist = [&](int a, int b) { return (x.row(a) - x.row(b)).norm(); };
  std::vector<std::vector<int>> nbrs(n);
  std::vector<double> kdist(n);
  for (int p = 0; p < n; ++p) {
    std::vector<int> order;
    for (int o = 0; o < n; ++o) {
      if (o != p) order.push_back(o);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dist(p, a) < dist(p, b); });
    order.resize(k);
    nbrs[p] = order;
    kdist[p] = dist(p, order.back());
  }
  std::vector<double> lrd(n);
  for (int p = 0; p < n; ++p) {
    double s = 0;
    for (int o : nbrs[p]) s += std::max(kdist[o], dist(p, o));
    lrd[p] = 1.0 / (s / k + LofModel::kReachFloor);
  }
  std::vector<double> lof(n);
  for (int p = 0; p < n; ++p) {
    double s = 0;
    for (int o : nbrs[p]) s += lrd[o] / lrd[p];
    lof[p] = s / k;
  }
  return lof;
}

TEST(PathLength, Constants) {
  EXPECT_EQ(AveragePathLength(2), 1.0);
  EXPECT_EQ(AveragePathLength(1), 0.0);
  EXPECT_DOUBLE_EQ(HarmonicNumber(1), 1.0);
  EXPECT_NEAR(HarmonicNumber(4), 25.0 / 12.0, 1e-15);
  EXPECT_NEAR(AveragePathLength(256), 2 * HarmonicNumber(255) - 2 * 255.0 / 256,
              1e-15);
  // Asymptotic branch agrees with the exact sum near the switch point.
  EXPECT_NEAR(HarmonicNumber(4096.5),
              HarmonicNumber(4096) + 0.5 / 4096.25, 1e-6);
}

TEST(IsolationForest, DefaultsAndDepthCap) {
  Rng rng(1);
  Matrix x(1000, 3);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (int j = 0; j < 3; ++j) x(r, j) = rng.Normal();
  }
  const IsolationForestModel m = FitIsolationForest(x, {});
  EXPECT_EQ(m.trees.size(), 100u);
  EXPECT_EQ(m.subsample_size, 256);
  for (const auto& t : m.trees) EXPECT_LE(t.Depth(), 8);

  const IsolationForestModel tiny =
      FitIsolationForest(Column({0.0, 1.0}), {.trees = 10});
  for (const auto& t : tiny.trees) EXPECT_LE(t.Depth(), 1);
}

TEST(IsolationForest, SameSeedSameForest) {
  Rng rng(2);
  Matrix x(300, 2);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    x(r, 0) = rng.Normal();
    x(r, 1) = rng.Normal();
  }
  IsolationForestOptions opts{.trees = 20, .subsample = 64, .seed = 5};
  const Vector a = IsolationForestScore(FitIsolationForest(x, opts), x);
  opts.threads = 3;
  const Vector b = IsolationForestScore(FitIsolationForest(x, opts), x);
  EXPECT_EQ(a, b);
  opts.seed = 6;
  EXPECT_NE(a, IsolationForestScore(FitIsolationForest(x, opts), x));
}

TEST(IsolationForest, PlantedOutlierScoresHighest) {
  Rng rng(3);
  Matrix x(50, 2);
  for (Eigen::Index r = 0; r < 49; ++r) {
    x(r, 0) = 0.1 * rng.Normal();
    x(r, 1) = 0.1 * rng.Normal();
  }
  x(49, 0) = 5.0;
  x(49, 1) = -5.0;
  const Vector s = IsolationForestScore(FitIsolationForest(x, {}), x);
  for (Eigen::Index r = 0; r < 49; ++r) EXPECT_GT(s(49), s(r));
  EXPECT_GT(s.minCoeff(), 0.0);
  EXPECT_LT(s.maxCoeff(), 1.0);
}

TEST(IsolationForest, RejectsBadInput) {
  EXPECT_THROW(FitIsolationForest(Column({1.0}), {}), std::invalid_argument);
  const auto m = FitIsolationForest(Column({0.0, 1.0, 2.0}), {});
  EXPECT_THROW(IsolationForestScore(m, Matrix::Zero(1, 2)),
               std::invalid_argument);
}

TEST(DefaultK, Examples) {
  EXPECT_EQ(DefaultK(148), 5);
  EXPECT_EQ(DefaultK(3), 1);
  EXPECT_EQ(DefaultK(22026), 10);
}

TEST(Knn, Examples) {
  const NeighborIndex index(Column({0.0, 1.0, 2.0}), 2);
  EXPECT_DOUBLE_EQ(KnnScoreTraining(index)(0), 1.5);
  EXPECT_DOUBLE_EQ(KnnScore(index, Column({0.0}))(0), 0.5);

  const NeighborIndex dup(Column({4.0, 4.0, 4.0, 9.0}), 3);
  EXPECT_EQ(KnnScore(dup, Column({4.0}))(0), 0.0);

  const Vector far = KnnScore(index, Column({100.0}));
  EXPECT_GE(far(0), 98.0);
  EXPECT_THROW(NeighborIndex(Column({0.0, 1.0}), 2), std::invalid_argument);
}

TEST(Knn, MatchesBruteForce) {
  Rng rng(4);
  Matrix train(60, 3), query(20, 3);
  for (Eigen::Index r = 0; r < 60; ++r) {
    for (int j = 0; j < 3; ++j) train(r, j) = rng.Normal();
  }
  for (Eigen::Index r = 0; r < 20; ++r) {
    for (int j = 0; j < 3; ++j) query(r, j) = rng.Normal();
  }
  const int k = 4;
  const NeighborIndex index(train, k);
  const Vector got = KnnScore(index, query);
  for (Eigen::Index q = 0; q < query.rows(); ++q) {
    std::vector<double> d;
    for (Eigen::Index r = 0; r < train.rows(); ++r) {
      d.push_back((train.row(r) - query.row(q)).norm());
    }
    std::sort(d.begin(), d.end());
    const double want = std::accumulate(d.begin(), d.begin() + k, 0.0) / k;
    EXPECT_NEAR(got(q), want, 1e-12);
  }
}

TEST(Lof, FourPointOracle) {
  const Matrix x = Column({0.0, 1.0, 2.0, 10.0});
  const LofModel model(NeighborIndex(x, 2));
  const Vector got = LofScoreTraining(model);
  const auto want = BruteLof(x, 2);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(got(i), want[i], 1e-12);
  // Hand value: lrd(10) = 1/8.5, neighbours 2 and 1 with lrd 2/3 and 1/2.
  EXPECT_NEAR(got(3), (2.0 / 3.0 + 0.5) / 2.0 * 8.5, 1e-8);
}

TEST(Lof, RandomMatchesOracle) {
  Rng rng(5);
  Matrix x(40, 2);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    x(r, 0) = rng.Normal();
    x(r, 1) = rng.Normal();
  }
  const LofModel model(NeighborIndex(x, 5));
  const Vector got = LofScoreTraining(model);
  const auto want = BruteLof(x, 5);
  for (int i = 0; i < 40; ++i) EXPECT_NEAR(got(i), want[i], 1e-10);
}

TEST(Lof, GridInteriorIsOne) {
  Matrix x(21, 1);
  for (int i = 0; i < 21; ++i) x(i, 0) = i;
  const LofModel model(NeighborIndex(x, 2));
  EXPECT_NEAR(LofScoreTraining(model)(10), 1.0, 1e-9);
  EXPECT_NEAR(LofScore(model, Column({10.5}))(0), 1.0, 0.1);
}

TEST(Lof, DuplicatesStayFinite) {
  const LofModel model(NeighborIndex(Column({1.0, 1.0, 1.0, 1.0, 5.0}), 2));
  const Vector s = LofScoreTraining(model);
  for (Eigen::Index i = 0; i < s.size(); ++i) EXPECT_TRUE(std::isfinite(s(i)));
  EXPECT_GT(s(4), s(0));
}

}  // namespace
}  // namespace sam
