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
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "sam/baselines.h"
#include "sam/bench.h"
#include "sam/cli.h"
#include "sam/dataset.h"
#include "sam/metrics.h"
#include "sam/random.h"
#include "sam/regression.h"
#include "sam/sam.h"

namespace sam {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0,
                double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

std::vector<std::string> Names(Eigen::Index d) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  return names;
}

Matrix Gaussian(Eigen::Index n, Eigen::Index d, Rng& rng) {
  Matrix x(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index j = 0; j < d; ++j) x(r, j) = rng.Normal();
  }
  return x;
}

// 1. Every fitted coefficient matrix has an exactly zero diagonal.
Outcome DiagonalZero() {
  Outcome o;
  Rng rng(101);
  int fits = 0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.Below(19));
    const Eigen::Index n = 50 + static_cast<Eigen::Index>(rng.Below(4951));
    Matrix x = Gaussian(n, d, rng);
    // Mix in shared structure so off-diagonal weights are far from zero.
    for (Eigen::Index j = 1; j < d; ++j) x.col(j) += 0.7 * x.col(j - 1);
    FitOptions opts;
    opts.variant.use_ransac = t % 4 == 0;
    opts.variant.normalize = t % 2 == 0;
    opts.zscore = t % 3 == 0;
    opts.seed = static_cast<std::uint64_t>(t);
    const SamModel m = FitSam(x, Names(d), opts);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (m.coefficients(i, i) != 0.0) {
        o.Check(false, "fit " + std::to_string(t) + " has nonzero diagonal");
      }
    }
    ++fits;
  }
  o.detail = o.pass ? std::to_string(fits) + " fits, all diagonals exactly 0"
                    : o.detail;
  return o;
}

// 2. Noiseless affine structure is reproduced exactly and perturbed rows
// are ranked above all clean rows.
Outcome ExactRecovery() {
  Outcome o;
  const auto start = Clock::now();
  Rng rng(202);
  const Eigen::Index n = 1000;
  Matrix x(n, 4);
  for (Eigen::Index r = 0; r < n; ++r) {
    x(r, 0) = rng.Normal();
    x(r, 1) = rng.Normal();
    x(r, 2) = rng.Normal();
    x(r, 3) = 1.5 * x(r, 0) - 2.0 * x(r, 1) + 0.5 * x(r, 2) + 3.0;
  }
  const SamModel m = FitSam(x, Names(4), {});
  const ScoreReport clean = Score(m, x);
  const double max_resid = clean.residuals.cwiseAbs().maxCoeff();
  o.Check(max_resid < 1e-8, Fmt("max |residual| %.3g", max_resid));

  Matrix test(n + 10, 4);
  test.topRows(n) = x;
  std::vector<bool> labels(n + 10, false);
  for (int k = 0; k < 10; ++k) {
    test.row(n + k) = x.row(k * 37);
    test(n + k, k % 4) += (k % 2 ? 1.0 : -1.0) * (1.0 + 0.5 * k);
    labels[n + k] = true;
  }
  const Vector s = ScoreOnly(m, test);
  const double auc = RocAuc(std::span<const double>(s.data(), s.size()), labels);
  o.Check(auc == 1.0, Fmt("ROC AUC %.6f", auc));
  const double secs = Seconds(start);
  o.Check(secs < 1.0, Fmt("runtime %.3f s", secs));
  if (o.pass) {
    o.detail = Fmt("max |residual| %.2g, perturbed ROC AUC %.2f, %.3f s",
                   max_resid, auc, secs);
  }
  return o;
}

// 3. Benchmark protocol on the synthetic generator.
Outcome MulcrossReproduction() {
  Outcome o;
  const auto start = Clock::now();
  GeneratorConfig g;
  g.n = 20000;
  BenchConfig cfg;
  cfg.datasets = {GenerateMulcrossLike(g).WithName("mc")};
  cfg.models = {ModelSpec::Parse("sam--"), ModelSpec::Parse("iforest")};
  cfg.repeats = 10;
  const BenchTable t = RunBench(cfg);
  const BenchCell& sam_roc = t.cell("mc", "sam--", Metric::kRocAuc);
  const BenchCell& sam_pr = t.cell("mc", "sam--", Metric::kPrAuc);
  const BenchCell& if_roc = t.cell("mc", "iforest", Metric::kRocAuc);
  const double secs = Seconds(start);
  const double a = sam_roc.mean.value_or(NAN);
  const double b = sam_pr.mean.value_or(NAN);
  const double c = if_roc.mean.value_or(NAN);
  o.Check(a >= 0.95, Fmt("SAM-- ROC AUC %.3f < 0.95", a));
  o.Check(b >= 0.85, Fmt("SAM-- PR AUC %.3f < 0.85", b));
  o.Check(c >= 0.90, Fmt("iForest ROC AUC %.3f < 0.90", c));
  o.Check(secs < 120.0, Fmt("runtime %.1f s", secs));
  o.detail = Fmt("SAM-- ROC %.3f, SAM-- PR %.3f, iForest ROC %.3f, %.1f s",
                 a, b, c, secs) +
             (o.pass ? "" : " [" + o.detail + "]");
  return o;
}

// 4. AUC implementations agree with slow oracles.
Outcome AucOracles() {
  Outcome o;
  Rng rng(404);
  double worst_roc = 0, worst_pr = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.Below(199);
    std::vector<double> s(n);
    std::vector<bool> y(n);
    const bool ties = t % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = ties ? static_cast<double>(rng.Below(8)) : rng.Normal();
      y[i] = rng.Uniform() < 0.3;
    }
    // Both classes present.
    y[0] = true;
    y[1] = false;
    worst_roc = std::max(worst_roc,
                         std::abs(RocAuc(s, y) - testing::PairwiseRocAuc(s, y)));
    worst_pr = std::max(worst_pr,
                        std::abs(PrAuc(s, y) - testing::ThresholdPrAuc(s, y)));
  }
  o.Check(worst_roc <= 1e-12, Fmt("ROC deviation %.3g", worst_roc));
  o.Check(worst_pr <= 1e-12, Fmt("PR deviation %.3g", worst_pr));
  if (o.pass) {
    o.detail = Fmt("100 instances, max deviation ROC %.2g, PR %.2g", worst_roc,
                   worst_pr);
  }
  return o;
}

// 5. RANSAC ignores 30% gross outliers on a planted line; OLS does not.
Outcome RansacRobustness() {
  Outcome o;
  double worst_ransac = 0, best_ols = INFINITY;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(5000 + seed);
    const int n = 200;
    Matrix x(n, 1);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = rng.Uniform(-10, 10);
      y(i) = 3.0 * x(i, 0) - 1.0;
    }
    for (int i = 0; i < n; ++i) {
      // Gross: far outside the inlier range of the target.
      if (rng.Uniform() < 0.3) {
        y(i) += (rng.Uniform() < 0.5 ? -1.0 : 1.0) * rng.Uniform(500, 1000);
      }
    }
    RansacConfig cfg;
    cfg.seed = seed;
    const LinearFit robust = RansacFit(x, y, cfg);
    const LinearFit plain = OlsFit(x, y);
    const double er = std::max(std::abs(robust.coefficients(0) - 3.0),
                               std::abs(robust.intercept + 1.0));
    const double eo = std::max(std::abs(plain.coefficients(0) - 3.0),
                               std::abs(plain.intercept + 1.0));
    worst_ransac = std::max(worst_ransac, er);
    best_ols = std::min(best_ols, eo);
  }
  o.Check(worst_ransac < 1e-6, Fmt("RANSAC error %.3g", worst_ransac));
  o.Check(best_ols > 0.1, Fmt("OLS error only %.3g", best_ols));
  if (o.pass) {
    o.detail = Fmt("20 seeds, worst RANSAC error %.2g, smallest OLS error %.2f",
                   worst_ransac, best_ols);
  }
  return o;
}

struct Timings {
  std::vector<double> fastest_ns;  // per point, per case
  // Median over rounds of time(case c) / time(case 0). The cases of a round
  // run back to back, so the ratio cancels slow periods that hit all of them.
  std::vector<double> median_ratio;
};

Timings TimeScoring(
    const std::vector<std::pair<const SamModel*, const Matrix*>>& cases) {
  constexpr int kRounds = 301;
  std::vector<std::vector<double>> secs(cases.size());
  volatile double sink = 0;
  for (int round = 0; round < kRounds; ++round) {
    for (std::size_t c = 0; c < cases.size(); ++c) {
      const auto start = Clock::now();
      const Vector s = ScoreOnly(*cases[c].first, *cases[c].second);
      secs[c].push_back(Seconds(start));
      sink = sink + s(0);
    }
  }
  Timings t;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    t.fastest_ns.push_back(*std::min_element(secs[c].begin(), secs[c].end()) *
                           1e9 / static_cast<double>(cases[c].second->rows()));
    std::vector<double> ratios;
    for (int r = 0; r < kRounds; ++r) ratios.push_back(secs[c][r] / secs[0][r]);
    std::nth_element(ratios.begin(), ratios.begin() + kRounds / 2, ratios.end());
    t.median_ratio.push_back(ratios[kRounds / 2]);
  }
  return t;
}

// 6. Scoring cost depends on d only.
Outcome ScoringCost() {
  Outcome o;
  Rng rng(606);
  const Eigen::Index q = 8000;
  const SamModel small16 = FitSam(Gaussian(1000, 16, rng), Names(16), {});
  const SamModel large16 = FitSam(Gaussian(100000, 16, rng), Names(16), {});
  const SamModel small32 = FitSam(Gaussian(1000, 32, rng), Names(32), {});
  const Matrix query16 = Gaussian(q, 16, rng);
  const Matrix query32 = Gaussian(q, 32, rng);
  const Timings t = TimeScoring(
      {{&small16, &query16}, {&large16, &query16}, {&small32, &query32}});
  const double n_diff = std::abs(t.median_ratio[1] - 1.0);
  const double d_ratio = t.median_ratio[2];
  o.Check(n_diff < 0.2, Fmt("n=1e3 vs n=1e5 differ by %.1f%%", 100 * n_diff));
  o.Check(d_ratio >= 3.0 && d_ratio <= 6.0, Fmt("d 16->32 ratio %.2f", d_ratio));
  o.detail = Fmt("per point %.1f ns (n=1e3) vs %.1f ns (n=1e5), differing by "
                 "%.1f%%; d 16->32 x%.2f",
                 t.fastest_ns[0], t.fastest_ns[1], 100 * n_diff, d_ratio) +
             (o.pass ? "" : " [" + o.detail + "]");
  return o;
}

// 7. Two bench runs with the same seed write byte-identical CSVs.
Outcome Determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sam_acceptance_det";
  fs::create_directories(dir);
  std::string files[2];
  for (int run = 0; run < 2; ++run) {
    const std::string path = (dir / ("r" + std::to_string(run) + ".csv")).string();
    std::ostringstream out, err;
    const int code = cli::Run(
        {"bench", "--dataset", "mc: mulcross n=2000 seed=7", "--models",
         "sam++,sam+-,sam-+,sam--,iforest,lof,knn", "--repeats", "3",
         "--seed", "11", "--threads", "2", "--out", path},
        out, err);
    o.Check(code == 0, "bench exit " + std::to_string(code) + ": " + err.str());
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    files[run] = buf.str();
  }
  fs::remove_all(dir);
  o.Check(!files[0].empty(), "empty results CSV");
  o.Check(files[0] == files[1], "results CSVs differ");
  if (o.pass) {
    o.detail = std::to_string(files[0].size()) + "-byte CSV identical across runs";
  }
  return o;
}

// 8. LOF, iForest and kNN behave as their definitions require.
Outcome BaselineSanity() {
  Outcome o;
  // LOF on the interior of a 2-D unit grid.
  Matrix grid(400, 2);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      grid(i * 20 + j, 0) = i;
      grid(i * 20 + j, 1) = j;
    }
  }
  const LofModel lof(NeighborIndex(grid, 4));
  const Vector lof_scores = LofScoreTraining(lof);
  double lof_dev = 0;
  for (int i = 3; i < 17; ++i) {
    for (int j = 3; j < 17; ++j) {
      lof_dev = std::max(lof_dev, std::abs(lof_scores(i * 20 + j) - 1.0));
    }
  }
  o.Check(lof_dev <= 0.1, Fmt("grid LOF deviates by %.3f", lof_dev));

  // iForest on 20 planted instances.
  int top = 0;
  bool in_range = true;
  for (std::uint64_t t = 0; t < 20; ++t) {
    Rng rng(800 + t);
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(t % 4);
    Matrix x = 0.5 * Gaussian(100, d, rng);
    const Eigen::Index planted = static_cast<Eigen::Index>(rng.Below(100));
    x.row(planted).setConstant(6.0);
    IsolationForestOptions opts;
    opts.seed = t;
    const Vector s = IsolationForestScore(FitIsolationForest(x, opts), x);
    in_range = in_range && s.minCoeff() > 0.0 && s.maxCoeff() < 1.0;
    Eigen::Index best = 0;
    s.maxCoeff(&best);
    if (best == planted) ++top;
  }
  o.Check(in_range, "iForest score outside (0, 1)");
  o.Check(top == 20, "planted outlier first in " + std::to_string(top) + "/20");

  // kNN against brute force, exact equality.
  Rng rng(888);
  bool knn_exact = true;
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index n = 10 + static_cast<Eigen::Index>(rng.Below(91));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.Below(5));
    const Matrix train = Gaussian(n, d, rng);
    const Matrix query = Gaussian(20, d, rng);
    const int k = 1 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(n - 1)));
    const Vector got = KnnScore(NeighborIndex(train, k), query);
    for (Eigen::Index qi = 0; qi < query.rows(); ++qi) {
      std::vector<double> dist;
      for (Eigen::Index r = 0; r < n; ++r) {
        double sq = 0;
        for (Eigen::Index j = 0; j < d; ++j) {
          const double diff = query(qi, j) - train(r, j);
          sq += diff * diff;
        }
        dist.push_back(std::sqrt(sq));
      }
      std::sort(dist.begin(), dist.end());
      double sum = 0;
      for (int i = 0; i < k; ++i) sum += dist[static_cast<std::size_t>(i)];
      if (got(qi) != sum / k) knn_exact = false;
    }
  }
  o.Check(knn_exact, "kNN differs from brute force");
  if (o.pass) {
    o.detail = Fmt("grid LOF max |LOF-1| %.2g; iForest outlier first 20/20; "
                   "kNN exact on 10 instances",
                   lof_dev);
  }
  return o;
}

// 9. Friedman statistic against direct evaluation.
Outcome FriedmanCheck() {
  Outcome o;
  // values[dataset][model], larger is better.
  const std::vector<std::vector<double>> values = {{0.91, 0.85, 0.62},
                                                   {0.70, 0.88, 0.55}};
  // Ranks by hand: dataset 0 -> (1, 2, 3), dataset 1 -> (2, 1, 3).
  const double r[3] = {1.5, 1.5, 3.0};
  const double m = 3, d = 2;
  double sum = 0;
  for (double rj : r) sum += (rj - (m + 1) / 2) * (rj - (m + 1) / 2);
  const double direct = 12 * d / (m * (m + 1)) * sum;
  const RankTable t = Friedman(values);
  const double err = std::abs(t.friedman_statistic - direct);
  o.Check(err <= 1e-12, Fmt("statistic %.15g vs %.15g", t.friedman_statistic,
                            direct));
  const RankTable ties = Friedman({{0.5, 0.5, 0.5}, {0.2, 0.2, 0.2}});
  o.Check(ties.friedman_statistic == 0.0,
          Fmt("all-ties statistic %.3g", ties.friedman_statistic));
  if (o.pass) {
    o.detail = Fmt("chi-square %.6f matches direct value (error %.2g); ties give 0",
                   t.friedman_statistic, err);
  }
  return o;
}

}  // namespace
}  // namespace sam

int main() {
  struct Criterion {
    const char* name;
    std::function<sam::Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"diagonal-zero invariant", sam::DiagonalZero},
      {"exact recovery on affine data", sam::ExactRecovery},
      {"mulcross-style reproduction", sam::MulcrossReproduction},
      {"AUC oracle equivalence", sam::AucOracles},
      {"RANSAC robustness", sam::RansacRobustness},
      {"scoring cost independent of n", sam::ScoringCost},
      {"bench determinism", sam::Determinism},
      {"baseline sanity", sam::BaselineSanity},
      {"Friedman statistic", sam::FriedmanCheck},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    sam::Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.pass) ++failed;
    std::printf("%s [%zu] %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
