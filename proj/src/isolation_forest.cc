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
#include <numeric>
#include <string>

#include "sam/baselines.h"
#include "sam/random.h"

namespace sam {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, int max_depth, Rng& rng)
      : x_(x), max_depth_(max_depth), rng_(rng) {}

  IsolationTree Build(std::vector<Eigen::Index> rows) {
    tree_.nodes.clear();
    rows_ = std::move(rows);
    Grow(0, rows_.size(), 0);
    return std::move(tree_);
  }

 private:
  // Builds the node for rows_[begin, end) and returns its index.
  int Grow(std::size_t begin, std::size_t end, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({});
    tree_.nodes[id].size = static_cast<int>(end - begin);
    if (depth >= max_depth_ || end - begin <= 1) return id;

    // Features with a nonzero range in this node.
    candidates_.clear();
    lows_.assign(static_cast<std::size_t>(x_.cols()), 0.0);
    highs_.assign(static_cast<std::size_t>(x_.cols()), 0.0);
    for (Eigen::Index j = 0; j < x_.cols(); ++j) {
      double lo = x_(rows_[begin], j);
      double hi = lo;
      for (std::size_t r = begin + 1; r < end; ++r) {
        const double v = x_(rows_[r], j);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi > lo) {
        candidates_.push_back(static_cast<int>(j));
        lows_[static_cast<std::size_t>(j)] = lo;
        highs_[static_cast<std::size_t>(j)] = hi;
      }
    }
    if (candidates_.empty()) return id;

    const int feature = candidates_[rng_.Below(candidates_.size())];
    const double lo = lows_[static_cast<std::size_t>(feature)];
    const double hi = highs_[static_cast<std::size_t>(feature)];
    double threshold = rng_.Uniform(lo, hi);
    // x < threshold goes left; keep both sides non-empty.
    if (!(threshold > lo)) threshold = lo + 0.5 * (hi - lo);
    if (!(threshold > lo)) threshold = hi;

    const auto mid = std::partition(
        rows_.begin() + static_cast<std::ptrdiff_t>(begin),
        rows_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](Eigen::Index r) { return x_(r, feature) < threshold; });
    const auto split = static_cast<std::size_t>(mid - rows_.begin());

    const int left = Grow(begin, split, depth + 1);
    const int right = Grow(split, end, depth + 1);
    IsolationNode& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = feature;
    node.threshold = threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  const Matrix& x_;
  const int max_depth_;
  Rng& rng_;
  IsolationTree tree_;
  std::vector<Eigen::Index> rows_;
  std::vector<int> candidates_;
  std::vector<double> lows_;
  std::vector<double> highs_;
};

int DepthFrom(const IsolationTree& tree, int node) {
  const IsolationNode& n = tree.nodes[static_cast<std::size_t>(node)];
  if (n.is_leaf()) return 0;
  return 1 + std::max(DepthFrom(tree, n.left), DepthFrom(tree, n.right));
}

}  // namespace

double HarmonicNumber(double i) {
  if (i <= 0.0) return 0.0;
  if (i <= 4096.0 && i == std::floor(i)) {
    double h = 0.0;
    // Small terms first.
    for (auto k = static_cast<long>(i); k >= 1; --k) h += 1.0 / static_cast<double>(k);
    return h;
  }
  return std::log(i) + kEulerGamma + 1.0 / (2.0 * i) - 1.0 / (12.0 * i * i);
}

double AveragePathLength(double n) {
  if (n <= 1.0) return 0.0;
  if (n == 2.0) return 1.0;
  return 2.0 * HarmonicNumber(n - 1.0) - 2.0 * (n - 1.0) / n;
}

int IsolationTree::Depth() const {
  if (nodes.empty()) return 0;
  return DepthFrom(*this, 0);
}

double IsolationTree::PathLength(const double* point) const {
  int id = 0;
  int edges = 0;
  while (!nodes[static_cast<std::size_t>(id)].is_leaf()) {
    const IsolationNode& n = nodes[static_cast<std::size_t>(id)];
    id = point[n.feature] < n.threshold ? n.left : n.right;
    ++edges;
  }
  return edges +
         AveragePathLength(nodes[static_cast<std::size_t>(id)].size);
}

IsolationForestModel FitIsolationForest(const Matrix& train,
                                        const IsolationForestOptions& options) {
  const Eigen::Index n = train.rows();
  if (n < 2) {
    throw std::invalid_argument("iforest: need at least 2 rows, got " +
                                std::to_string(n));
  }
  if (options.trees < 1) {
    throw std::invalid_argument("iforest: tree count must be positive");
  }
  if (options.subsample < 2) {
    throw std::invalid_argument("iforest: subsample size must be at least 2");
  }
  IsolationForestModel model;
  model.dimension = train.cols();
  model.subsample_size =
      static_cast<int>(std::min<Eigen::Index>(options.subsample, n));
  model.c_norm = AveragePathLength(model.subsample_size);
  const int max_depth = static_cast<int>(
      std::ceil(std::log2(static_cast<double>(model.subsample_size))));

  model.trees.resize(static_cast<std::size_t>(options.trees));
  ParallelFor(model.trees.size(), options.threads, [&](std::size_t t) {
    Rng rng(MixSeed(options.seed, t));
    // Subsample without replacement by a partial Fisher-Yates shuffle.
    std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    const auto m = static_cast<std::size_t>(model.subsample_size);
    for (std::size_t s = 0; s < m; ++s) {
      const std::size_t j = s + rng.Below(all.size() - s);
      std::swap(all[s], all[j]);
    }
    all.resize(m);
    TreeBuilder builder(train, max_depth, rng);
    model.trees[t] = builder.Build(std::move(all));
  });
  return model;
}

Vector IsolationForestScore(const IsolationForestModel& model,
                            const Matrix& x) {
  if (x.cols() != model.dimension) {
    throw std::invalid_argument("iforest: input has " +
                                std::to_string(x.cols()) +
                                " columns, model expects " +
                                std::to_string(model.dimension));
  }
  Vector scores(x.rows());
  std::vector<double> point(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      point[static_cast<std::size_t>(j)] = x(r, j);
    }
    double total = 0.0;
    for (const auto& tree : model.trees) total += tree.PathLength(point.data());
    const double mean = total / static_cast<double>(model.trees.size());
    scores(r) = std::exp2(-mean / model.c_norm);
  }
  return scores;
}

}  // namespace sam
