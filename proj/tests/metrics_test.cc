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

#include <cmath>
#include <limits>

#include "gtest/gtest.h"
#include "oracles.h"
#include "sam/random.h"

namespace sam {
namespace {

using testing::PairwiseRocAuc;
using testing::ThresholdCurve;
using testing::ThresholdPrAuc;

constexpr bool A = true;
constexpr bool N = false;

TEST(RocAuc, Examples) {
  EXPECT_DOUBLE_EQ(RocAuc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, {N, N, A, A}),
                   0.75);
  EXPECT_DOUBLE_EQ(RocAuc(std::vector<double>{1, 2, 3, 4}, {N, N, A, A}), 1.0);
  EXPECT_DOUBLE_EQ(RocAuc(std::vector<double>{7, 7, 7, 7}, {N, A, N, A}), 0.5);
  EXPECT_THROW(RocAuc(std::vector<double>{1, 2}, {A, A}), std::invalid_argument);
  EXPECT_THROW(RocAuc(std::vector<double>{1, 2}, {A}), std::invalid_argument);
}

TEST(RocAuc, RandomInstancesMatchPairwiseOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 2 + rng.Below(150);
    std::vector<double> s(n);
    std::vector<bool> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.Below(10));  // plenty of ties
      y[i] = rng.Uniform() < 0.3;
    }
    y[0] = true;
    y[1] = false;
    EXPECT_NEAR(RocAuc(s, y), PairwiseRocAuc(s, y), 1e-12);
  }
}

TEST(RocAuc, Properties) {
  Rng rng(2);
  std::vector<double> s(300), neg(300), cubed(300);
  std::vector<bool> y(300);
  for (int i = 0; i < 300; ++i) {
    s[i] = rng.Normal();
    neg[i] = -s[i];
    cubed[i] = std::exp(s[i]) * 3 + 1;
    y[i] = i % 4 == 0;
  }
  EXPECT_NEAR(RocAuc(s, y) + RocAuc(neg, y), 1.0, 1e-12);
  EXPECT_NEAR(RocAuc(s, y), RocAuc(cubed, y), 1e-15);
}

TEST(PrAuc, Examples) {
  EXPECT_NEAR(PrAuc(std::vector<double>{0.9, 0.8, 0.7}, {A, N, A}),
              0.5 + 2.0 / 3.0 * 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(PrAuc(std::vector<double>{5, 1, 2}, {A, N, N}), 1.0);
  EXPECT_THROW(PrAuc(std::vector<double>{1, 2}, {N, N}), std::invalid_argument);
}

TEST(PrAuc, RandomRankerNearPrevalence) {
  Rng rng(3);
  std::vector<double> s(10000);
  std::vector<bool> y(10000);
  for (int i = 0; i < 10000; ++i) {
    s[i] = rng.Uniform();
    y[i] = rng.Uniform() < 0.1;
  }
  EXPECT_NEAR(PrAuc(s, y), 0.1, 0.05);
}

TEST(PrAuc, OneIffPerfectRanking) {
  EXPECT_DOUBLE_EQ(PrAuc(std::vector<double>{3, 3, 1}, {A, A, N}), 1.0);
  EXPECT_LT(PrAuc(std::vector<double>{3, 3, 1}, {A, N, A}), 1.0);
}

TEST(PrAuc, RandomInstancesMatchThresholdOracle) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 1 + rng.Below(150);
    std::vector<double> s(n);
    std::vector<bool> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.Below(12));
      y[i] = rng.Uniform() < 0.4;
    }
    y[0] = true;
    EXPECT_NEAR(PrAuc(s, y), ThresholdPrAuc(s, y), 1e-12);
  }
}

TEST(Curve, TwoPointRoc) {
  const CurvePoints c =
      ComputeCurve(std::vector<double>{0.2, 0.9}, {N, A}, CurveKind::kRoc);
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_EQ(c.points[0].x, 0.0);
  EXPECT_EQ(c.points[0].y, 0.0);
  EXPECT_TRUE(std::isinf(c.points[0].threshold));
  EXPECT_EQ(c.points[1].x, 0.0);
  EXPECT_EQ(c.points[1].y, 1.0);
  EXPECT_EQ(c.points[2].x, 1.0);
  EXPECT_EQ(c.points[2].y, 1.0);
  EXPECT_EQ(c.auc, 1.0);
}

TEST(Curve, MatchesEnumerationOracle) {
  Rng rng(5);
  std::vector<double> s(1000);
  std::vector<bool> y(1000);
  for (int i = 0; i < 1000; ++i) {
    s[i] = std::round(rng.Normal() * 20) / 20;
    y[i] = rng.Uniform() < 0.2;
  }
  for (CurveKind kind : {CurveKind::kRoc, CurveKind::kPr}) {
    const CurvePoints c = ComputeCurve(s, y, kind);
    const auto want = ThresholdCurve(s, y, kind);
    ASSERT_EQ(c.points.size(), want.size() + 1);
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_EQ(c.points[i + 1].threshold, want[i].threshold);
      EXPECT_NEAR(c.points[i + 1].x, want[i].x, 1e-15);
      EXPECT_NEAR(c.points[i + 1].y, want[i].y, 1e-15);
    }
    // Integration of the emitted points.
    double area = 0;
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      const auto& a = c.points[i - 1];
      const auto& b = c.points[i];
      area += kind == CurveKind::kRoc ? (b.x - a.x) * (a.y + b.y) / 2
                                      : (b.x - a.x) * b.y;
    }
    EXPECT_NEAR(c.auc, area, 1e-12);
    EXPECT_NEAR(c.auc, kind == CurveKind::kRoc ? RocAuc(s, y) : PrAuc(s, y),
                1e-12);
    if (kind == CurveKind::kRoc) {
      EXPECT_EQ(c.points.back().x, 1.0);
      EXPECT_EQ(c.points.back().y, 1.0);
      for (std::size_t i = 1; i < c.points.size(); ++i) {
        EXPECT_GE(c.points[i].x, c.points[i - 1].x);
      }
    }
  }
}

TEST(Curve, CsvExport) {
  const CurvePoints c =
      ComputeCurve(std::vector<double>{0.2, 0.9}, {N, A}, CurveKind::kRoc);
  const std::string csv = CurveToCsv(c);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "threshold,x,y");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Friedman, AllTies) {
  const RankTable t = Friedman({{0.5, 0.5, 0.5}, {0.7, 0.7, 0.7}});
  EXPECT_EQ(t.friedman_statistic, 0.0);
  for (double r : t.average_ranks) EXPECT_EQ(r, 2.0);
  EXPECT_NEAR(t.p_value, 1.0, 1e-12);
}

TEST(Friedman, DominantModelHasRankOne) {
  const RankTable t =
      Friedman({{0.9, 0.5, 0.7}, {0.8, 0.6, 0.4}, {0.95, 0.1, 0.2}});
  EXPECT_EQ(t.average_ranks[0], 1.0);
  EXPECT_EQ(t.n_models, 3);
  EXPECT_EQ(t.n_datasets, 3);
  for (const auto& row : t.ranks) {
    EXPECT_DOUBLE_EQ(row[0] + row[1] + row[2], 6.0);
  }
}

TEST(Friedman, HandBuiltTable) {
  // Ranks: dataset 0 -> (1, 2.5, 2.5), dataset 1 -> (2, 1, 3).
  const RankTable t = Friedman({{0.9, 0.4, 0.4}, {0.6, 0.8, 0.1}});
  EXPECT_EQ(t.ranks[0], (std::vector<double>{1, 2.5, 2.5}));
  EXPECT_EQ(t.ranks[1], (std::vector<double>{2, 1, 3}));
  const double r0 = 1.5, r1 = 1.75, r2 = 2.75;
  const double direct =
      12.0 * 2 / (3 * 4) *
      ((r0 - 2) * (r0 - 2) + (r1 - 2) * (r1 - 2) + (r2 - 2) * (r2 - 2));
  EXPECT_NEAR(t.friedman_statistic, direct, 1e-12);
  // Two degrees of freedom: the chi-square tail is exp(-x/2).
  EXPECT_NEAR(t.p_value, std::exp(-direct / 2), 1e-12);
}

TEST(Friedman, RejectsMissingCells) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Friedman({{0.1, nan}, {0.2, 0.3}}), std::invalid_argument);
  EXPECT_THROW(Friedman({{0.1, 0.2}, {0.2}}), std::invalid_argument);
  EXPECT_THROW(Friedman({{0.1, 0.2}}), std::invalid_argument);
}

TEST(ChiSquare, KnownTails) {
  EXPECT_NEAR(ChiSquareSurvival(3.841458820694124, 1), 0.05, 1e-12);
  EXPECT_NEAR(ChiSquareSurvival(5.991464547107979, 2), 0.05, 1e-12);
  EXPECT_NEAR(ChiSquareSurvival(40.0, 10), 1.694474393006737e-05, 1e-15);
  EXPECT_NEAR(RegularizedGammaQ(1.0, 2.0), std::exp(-2.0), 1e-14);
}

}  // namespace
}  // namespace sam
