/*
 * Copyright 2026 The Backorder Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <limits>
#include <numeric>

#include "backorder/error.hpp"
#include "backorder/random.hpp"
#include "backorder/tree_ensemble.hpp"

namespace backorder {
namespace {

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const std::uint8_t> y,
              const TreeOptions& options)
      : x_(x), y_(y), options_(options), rng_(options.seed) {
    if (options.feature_subset.empty()) {
      candidates_.resize(static_cast<std::size_t>(x.cols()));
      std::iota(candidates_.begin(), candidates_.end(), 0);
    } else {
      candidates_ = options.feature_subset;
      for (auto f : candidates_) {
        if (f >= static_cast<std::size_t>(x.cols())) {
          throw ArgumentError("tree feature index out of range");
        }
      }
    }
    rows_.resize(static_cast<std::size_t>(x.rows()));
    std::iota(rows_.begin(), rows_.end(), 0);
  }

  std::vector<TreeNode> build() {
    grow(0, rows_.size(), 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
    bool found = false;
  };

  std::int32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
    TreeNode node;
    for (std::size_t i = begin; i < end; ++i) {
      (y_[rows_[i]] ? node.count1 : node.count0) += 1.0;
    }
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);

    const std::size_t n = end - begin;
    if (node.count0 == 0.0 || node.count1 == 0.0) return id;
    if (options_.max_depth && depth >= *options_.max_depth) return id;
    if (n < 2 * options_.min_leaf) return id;

    const Split split = best_split(begin, end, node);
    if (!split.found) return id;

    const auto f = static_cast<Eigen::Index>(split.feature);
    const auto mid = std::stable_partition(
        rows_.begin() + static_cast<long>(begin), rows_.begin() + static_cast<long>(end),
        [&](std::size_t r) { return x_(static_cast<Eigen::Index>(r), f) <= split.threshold; });
    const auto cut = static_cast<std::size_t>(mid - rows_.begin());

    const std::int32_t left = grow(begin, cut, depth + 1);
    const std::int32_t right = grow(cut, end, depth + 1);
    auto& stored = nodes_[static_cast<std::size_t>(id)];
    stored.feature = static_cast<std::int32_t>(split.feature);
    stored.threshold = split.threshold;
    stored.left = left;
    stored.right = right;
    return id;
  }

  // Maximizes sum over children of (n0^2 + n1^2) / n_child, which is the
  // same as minimizing the size-weighted Gini impurity. Ties keep the first
  // candidate (feature order, then ascending threshold).
  Split best_split(std::size_t begin, std::size_t end, const TreeNode& parent) {
    std::vector<std::size_t> order = candidates_;
    std::size_t limit = order.size();
    if (options_.split_features && *options_.split_features < order.size()) {
      rng_.shuffle(std::span<std::size_t>(order));
      limit = std::max<std::size_t>(1, *options_.split_features);
    }

    const std::size_t n = end - begin;
    const std::size_t min_leaf = std::max<std::size_t>(1, options_.min_leaf);
    Split best;
    scratch_.resize(n);
    for (std::size_t k = 0; k < order.size(); ++k) {
      // Keep drawing past the per-split budget only while nothing splits.
      if (k >= limit && best.found) break;
      const auto f = static_cast<Eigen::Index>(order[k]);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = rows_[begin + i];
        scratch_[i] = {x_(static_cast<Eigen::Index>(r), f), y_[r]};
      }
      std::sort(scratch_.begin(), scratch_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (scratch_.front().first == scratch_.back().first) continue;

      double l0 = 0.0, l1 = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        (scratch_[i].second ? l1 : l0) += 1.0;
        if (scratch_[i].first == scratch_[i + 1].first) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        const double r0 = parent.count0 - l0;
        const double r1 = parent.count1 - l1;
        const double score = (l0 * l0 + l1 * l1) / static_cast<double>(n_left) +
                             (r0 * r0 + r1 * r1) / static_cast<double>(n_right);
        if (score > best.score) {
          const double a = scratch_[i].first;
          const double b = scratch_[i + 1].first;
          double threshold = a + (b - a) * 0.5;
          if (!(threshold < b)) threshold = a;
          best = {order[k], threshold, score, true};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  std::span<const std::uint8_t> y_;
  const TreeOptions& options_;
  Rng rng_;
  std::vector<std::size_t> candidates_;
  std::vector<std::size_t> rows_;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, std::uint8_t>> scratch_;
};

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ArgumentError("tree needs at least one node");
  const auto n = static_cast<std::int32_t>(nodes_.size());
  for (const auto& node : nodes_) {
    if (!node.is_leaf() && (node.left <= 0 || node.right <= 0 || node.left >= n ||
                            node.right >= n)) {
      throw ArgumentError("tree node has invalid child index");
    }
  }
}

std::size_t DecisionTree::leaf_index(const FeatureMatrix& x, Eigen::Index row) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& node = nodes_[i];
    i = static_cast<std::size_t>(x(row, node.feature) <= node.threshold ? node.left
                                                                        : node.right);
  }
  return i;
}

std::uint8_t DecisionTree::vote_row(const FeatureMatrix& x, Eigen::Index row) const {
  const auto& leaf = nodes_[leaf_index(x, row)];
  return leaf.count1 >= leaf.count0 ? 1 : 0;
}

std::vector<double> DecisionTree::predict_proba(const FeatureMatrix& x) const {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) out[static_cast<std::size_t>(r)] = predict_row(x, r);
  return out;
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack = {{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::vector<std::size_t> DecisionTree::used_features() const {
  std::vector<std::size_t> out;
  for (const auto& node : nodes_) {
    if (!node.is_leaf()) out.push_back(static_cast<std::size_t>(node.feature));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void DecisionTree::remap_features(std::span<const std::size_t> mapping) {
  for (auto& node : nodes_) {
    if (!node.is_leaf()) {
      node.feature = static_cast<std::int32_t>(mapping[static_cast<std::size_t>(node.feature)]);
    }
  }
}

DecisionTree fit_tree(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                      const TreeOptions& options) {
  if (x.rows() == 0 || y.empty()) throw ArgumentError("cannot fit a tree on empty data");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw ArgumentError("tree: feature rows and labels differ in length");
  }
  TreeBuilder builder(x, y, options);
  return DecisionTree(builder.build());
}

}  // namespace backorder
