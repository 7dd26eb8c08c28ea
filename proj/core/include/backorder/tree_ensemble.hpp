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

#ifndef BACKORDER_TREE_ENSEMBLE_HPP_
#define BACKORDER_TREE_ENSEMBLE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "backorder/classifier.hpp"
#include "backorder/dataset.hpp"

namespace backorder {

// One node of a flattened binary tree. Internal nodes route rows with
// x[feature] <= threshold to `left`.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double count0 = 0.0;
  double count1 = 0.0;

  bool is_leaf() const { return feature < 0; }
  double positive_fraction() const {
    const double total = count0 + count1;
    return total > 0.0 ? count1 / total : 0.0;
  }
};

struct TreeOptions {
  std::optional<std::size_t> max_depth;  // unlimited when empty
  std::size_t min_leaf = 1;
  // Candidate columns; empty means every column.
  std::vector<std::size_t> feature_subset;
  // Features drawn per split (random-forest style); empty means all
  // candidates are evaluated at every split.
  std::optional<std::size_t> split_features;
  std::uint64_t seed = 0;
};

// CART classification tree grown greedily on Gini impurity.
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }

  std::size_t leaf_index(const FeatureMatrix& x, Eigen::Index row) const;
  // Class-1 fraction of the leaf reached by `row`.
  double predict_row(const FeatureMatrix& x, Eigen::Index row) const {
    return nodes_[leaf_index(x, row)].positive_fraction();
  }
  // Hard vote: majority class of the leaf, ties to class 1.
  std::uint8_t vote_row(const FeatureMatrix& x, Eigen::Index row) const;
  std::vector<double> predict_proba(const FeatureMatrix& x) const;

  std::size_t depth() const;
  std::size_t leaf_count() const;
  std::vector<std::size_t> used_features() const;

  void remap_features(std::span<const std::size_t> mapping);

 private:
  std::vector<TreeNode> nodes_;
};

// Candidate thresholds are midpoints between consecutive distinct values.
// Splitting stops at pure nodes, `max_depth`, when a child would fall below
// `min_leaf` rows, or when no feature has two distinct values.
DecisionTree fit_tree(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                      const TreeOptions& options = {});

enum class EnsembleKind { kBalancedBagging, kRandomForest };

std::string to_string(EnsembleKind kind);

struct EnsembleConfig {
  std::size_t n_estimators = 1000;
  // Fraction of features in each tree's patch.
  double max_features = 1.0;
  // Sample rows with replacement.
  bool bootstrap = true;
  // Sample the feature patch with replacement.
  bool bootstrap_features = false;
  std::optional<std::size_t> max_depth;
  std::size_t min_leaf = 1;
  // Random forest only: features drawn at each split. Defaults to
  // ceil(sqrt(n_features)).
  std::optional<std::size_t> split_features;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  // Keep each bag's row indices (diagnostics and tests).
  bool record_bags = false;

  void validate() const;
};

struct BagRecord {
  std::size_t minority = 0;  // minority-class rows drawn
  std::size_t majority = 0;  // majority-class rows drawn
  std::size_t rows = 0;      // rows materialized for this tree
  std::size_t distinct = 0;  // distinct training rows among them
  std::vector<std::size_t> row_indices;  // only with record_bags
};

// Size of a feature patch: ceil(max_features * n_features), at least 1.
std::size_t patch_size(double max_features, std::size_t n_features);

// A bag of CART trees, each fit on its own sample of rows and patch of
// features; probability is the mean leaf class-1 fraction across trees.
class BaggedEnsemble final : public Classifier {
 public:
  BaggedEnsemble() = default;
  BaggedEnsemble(EnsembleKind kind, EnsembleConfig config, std::size_t n_features,
                 std::vector<DecisionTree> trees,
                 std::vector<std::vector<std::size_t>> patches,
                 std::vector<BagRecord> bags);

  std::vector<double> predict_proba(const FeatureMatrix& x) const override;
  std::size_t n_features() const override { return n_features_; }
  std::string kind() const override { return to_string(kind_); }

  // Number of trees voting class 1 for every row.
  std::vector<std::size_t> vote_counts(const FeatureMatrix& x) const;
  // Majority vote over hard tree votes; ties go to class 1.
  std::vector<std::uint8_t> majority_vote(const FeatureMatrix& x) const;

  EnsembleKind ensemble_kind() const { return kind_; }
  const EnsembleConfig& config() const { return config_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<std::vector<std::size_t>>& feature_patches() const { return patches_; }
  const std::vector<BagRecord>& bags() const { return bags_; }

  std::vector<std::string> feature_names;

  // Largest number of rows any single tree was trained on.
  std::size_t peak_bag_rows() const;
  // Features used by at least one split.
  std::vector<std::size_t> used_features() const;

 private:
  void check_width(const FeatureMatrix& x) const;

  EnsembleKind kind_ = EnsembleKind::kBalancedBagging;
  EnsembleConfig config_;
  std::size_t n_features_ = 0;
  std::vector<DecisionTree> trees_;
  std::vector<std::vector<std::size_t>> patches_;
  std::vector<BagRecord> bags_;
};

// Balanced bagging: every bag takes the minority rows (bootstrapped when
// config.bootstrap) and an equal-size uniform sample of majority rows, plus a
// random feature patch; one tree per bag.
BaggedEnsemble fit_balanced_bagging(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                                    const EnsembleConfig& config);
BaggedEnsemble fit_balanced_bagging(const DataTable& table,
                                    std::span<const std::size_t> train_idx,
                                    const EnsembleConfig& config);

// Random forest: plain bootstrap bags over all rows with per-split feature
// subsampling.
BaggedEnsemble fit_random_forest(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                                 const EnsembleConfig& config);
BaggedEnsemble fit_random_forest(const DataTable& table,
                                 std::span<const std::size_t> train_idx,
                                 const EnsembleConfig& config);

// ---------------------------------------------------------------------------
// Grid search with stratified k-fold cross-validation on ROC-AUC.
// ---------------------------------------------------------------------------

struct ParameterGrid {
  std::vector<std::size_t> n_estimators;
  std::vector<double> max_features;
  std::vector<bool> bootstrap;
  std::vector<bool> bootstrap_features;

  // 3x3 sub-lattice used by default.
  static ParameterGrid desk();
  // The exhaustive 13 x 13 x 2 x 2 lattice.
  static ParameterGrid full();

  std::vector<EnsembleConfig> expand(const EnsembleConfig& base) const;
};

struct GridPointScore {
  EnsembleConfig config;
  std::vector<double> fold_scores;
  double mean_score = 0.0;
};

struct GridSearchResult {
  EnsembleConfig best;
  std::size_t best_index = 0;
  std::vector<GridPointScore> points;
};

// Assigns every row to one of `folds` folds, class by class, so each fold
// keeps the global class balance. Returns the held-out rows of each fold.
std::vector<RowIndices> stratified_folds(std::span<const std::uint8_t> y, std::size_t folds,
                                         std::uint64_t seed);

// Fits a balanced-bagging ensemble per (grid point, fold) and picks the
// highest mean held-out ROC-AUC; ties prefer fewer estimators, then a lower
// max_features, then grid order.
GridSearchResult grid_search_cv(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                                const ParameterGrid& grid, const EnsembleConfig& base,
                                std::size_t folds, std::uint64_t seed,
                                std::size_t threads = 1);
GridSearchResult grid_search_cv(const DataTable& table,
                                std::span<const std::size_t> train_idx,
                                const ParameterGrid& grid, const EnsembleConfig& base,
                                std::size_t folds, std::uint64_t seed,
                                std::size_t threads = 1);

}  // namespace backorder

#endif  // BACKORDER_TREE_ENSEMBLE_HPP_
