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
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "backorder/error.hpp"
#include "backorder/evaluate.hpp"
#include "backorder/parallel.hpp"
#include "backorder/random.hpp"
#include "backorder/tree_ensemble.hpp"

namespace backorder {
namespace {

// Floyd's algorithm: k distinct values from [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::unordered_set<std::size_t> chosen;
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    const std::size_t t = rng.index(j + 1);
    if (chosen.insert(t).second) {
      out.push_back(t);
    } else {
      chosen.insert(j);
      out.push_back(j);
    }
  }
  return out;
}

struct ClassRows {
  std::vector<std::size_t> minority;
  std::vector<std::size_t> majority;
  std::uint8_t minority_label = 1;
};

ClassRows partition_classes(std::span<const std::uint8_t> y) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? pos : neg).push_back(i);
  ClassRows out;
  if (pos.size() <= neg.size()) {
    out.minority = std::move(pos);
    out.majority = std::move(neg);
    out.minority_label = 1;
  } else {
    out.minority = std::move(neg);
    out.majority = std::move(pos);
    out.minority_label = 0;
  }
  return out;
}

BaggedEnsemble fit_bagged(EnsembleKind kind, const FeatureMatrix& x,
                          std::span<const std::uint8_t> y, const EnsembleConfig& config) {
  config.validate();
  if (x.rows() == 0) throw ArgumentError("ensemble: no training rows");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw ArgumentError("ensemble: feature rows and labels differ in length");
  }
  const auto classes = partition_classes(y);
  if (classes.minority.empty()) {
    throw DataError("ensemble: training rows contain a single class (minority count is 0)");
  }

  const auto n_rows = static_cast<std::size_t>(x.rows());
  const auto n_features = static_cast<std::size_t>(x.cols());
  const std::size_t n_min = classes.minority.size();
  const std::size_t n_maj = classes.majority.size();
  const bool balanced = kind == EnsembleKind::kBalancedBagging;

  std::vector<DecisionTree> trees(config.n_estimators);
  std::vector<std::vector<std::size_t>> patches(config.n_estimators);
  std::vector<BagRecord> bags(config.n_estimators);

  parallel_for(config.n_estimators, config.threads, [&](std::size_t b) {
    Rng rng(derive_seed(config.seed, b));
    std::vector<std::size_t> rows;
    BagRecord record;

    if (balanced) {
      rows.reserve(2 * n_min);
      if (config.bootstrap) {
        for (std::size_t i = 0; i < n_min; ++i) rows.push_back(classes.minority[rng.index(n_min)]);
        for (std::size_t i = 0; i < n_min; ++i) rows.push_back(classes.majority[rng.index(n_maj)]);
      } else {
        rows = classes.minority;
        for (auto t : sample_without_replacement(n_maj, n_min, rng)) {
          rows.push_back(classes.majority[t]);
        }
      }
      record.minority = n_min;
      record.majority = rows.size() - n_min;
    } else {
      if (config.bootstrap) {
        rows.reserve(n_rows);
        for (std::size_t i = 0; i < n_rows; ++i) rows.push_back(rng.index(n_rows));
      } else {
        rows.resize(n_rows);
        std::iota(rows.begin(), rows.end(), 0);
      }
      for (auto r : rows) (y[r] == classes.minority_label ? record.minority : record.majority)++;
    }
    if (balanced && record.minority != record.majority) {
      throw std::logic_error("balanced bag lost class parity");
    }

    std::vector<std::size_t> patch;
    if (balanced) {
      const std::size_t k = patch_size(config.max_features, n_features);
      if (config.bootstrap_features) {
        for (std::size_t i = 0; i < k; ++i) patch.push_back(rng.index(n_features));
      } else {
        patch = sample_without_replacement(n_features, k, rng);
        std::sort(patch.begin(), patch.end());
      }
    } else {
      patch.resize(n_features);
      std::iota(patch.begin(), patch.end(), 0);
    }

    FeatureMatrix xb(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(patch.size()));
    std::vector<std::uint8_t> yb(rows.size());
    for (std::size_t j = 0; j < patch.size(); ++j) {
      const auto src = static_cast<Eigen::Index>(patch[j]);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        xb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            x(static_cast<Eigen::Index>(rows[i]), src);
      }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) yb[i] = y[rows[i]];

    TreeOptions options;
    options.max_depth = config.max_depth;
    options.min_leaf = config.min_leaf;
    if (!balanced) {
      options.split_features = config.split_features.value_or(static_cast<std::size_t>(
          std::ceil(std::sqrt(static_cast<double>(n_features)))));
    }
    options.seed = rng.next_u64();
    DecisionTree tree = fit_tree(xb, yb, options);
    tree.remap_features(patch);

    record.rows = rows.size();
    std::vector<std::size_t> distinct(rows);
    std::sort(distinct.begin(), distinct.end());
    record.distinct = static_cast<std::size_t>(
        std::unique(distinct.begin(), distinct.end()) - distinct.begin());
    if (config.record_bags) record.row_indices = std::move(rows);

    trees[b] = std::move(tree);
    patches[b] = std::move(patch);
    bags[b] = std::move(record);
  });

  return BaggedEnsemble(kind, config, n_features, std::move(trees), std::move(patches),
                        std::move(bags));
}

}  // namespace

std::string to_string(EnsembleKind kind) {
  return kind == EnsembleKind::kBalancedBagging ? "balanced_bagging" : "random_forest";
}

void EnsembleConfig::validate() const {
  if (n_estimators < 1) throw ArgumentError("n_estimators must be >= 1");
  if (!(max_features > 0.0 && max_features <= 1.0)) {
    throw ArgumentError("max_features must lie in (0, 1]");
  }
  if (min_leaf < 1) throw ArgumentError("min_leaf must be >= 1");
  if (split_features && *split_features < 1) {
    throw ArgumentError("split_features must be >= 1");
  }
}

std::size_t patch_size(double max_features, std::size_t n_features) {
  const double raw = std::ceil(max_features * static_cast<double>(n_features) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n_features);
}

BaggedEnsemble::BaggedEnsemble(EnsembleKind kind, EnsembleConfig config,
                               std::size_t n_features, std::vector<DecisionTree> trees,
                               std::vector<std::vector<std::size_t>> patches,
                               std::vector<BagRecord> bags)
    : kind_(kind),
      config_(std::move(config)),
      n_features_(n_features),
      trees_(std::move(trees)),
      patches_(std::move(patches)),
      bags_(std::move(bags)) {
  if (trees_.empty()) throw ArgumentError("ensemble needs at least one tree");
  if (patches_.size() != trees_.size()) {
    throw ArgumentError("ensemble needs one feature patch per tree");
  }
}

void BaggedEnsemble::check_width(const FeatureMatrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != n_features_) {
    throw ArgumentError("ensemble expects " + std::to_string(n_features_) +
                        " feature columns, got " + std::to_string(x.cols()));
  }
}

std::vector<double> BaggedEnsemble::predict_proba(const FeatureMatrix& x) const {
  check_width(x);
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<double> out(n, 0.0);
  constexpr std::size_t kChunk = 512;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  const double inv = 1.0 / static_cast<double>(trees_.size());
  parallel_for(chunks, config_.threads, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t r = c * kChunk; r < end; ++r) {
      double sum = 0.0;
      for (const auto& tree : trees_) sum += tree.predict_row(x, static_cast<Eigen::Index>(r));
      out[r] = sum * inv;
    }
  });
  return out;
}

std::vector<std::size_t> BaggedEnsemble::vote_counts(const FeatureMatrix& x) const {
  check_width(x);
  std::vector<std::size_t> votes(static_cast<std::size_t>(x.rows()), 0);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (const auto& tree : trees_) votes[static_cast<std::size_t>(r)] += tree.vote_row(x, r);
  }
  return votes;
}

std::vector<std::uint8_t> BaggedEnsemble::majority_vote(const FeatureMatrix& x) const {
  const auto votes = vote_counts(x);
  std::vector<std::uint8_t> out(votes.size());
  for (std::size_t i = 0; i < votes.size(); ++i) {
    out[i] = 2 * votes[i] >= trees_.size() ? 1 : 0;
  }
  return out;
}

std::size_t BaggedEnsemble::peak_bag_rows() const {
  std::size_t peak = 0;
  for (const auto& b : bags_) peak = std::max(peak, b.rows);
  return peak;
}

std::vector<std::size_t> BaggedEnsemble::used_features() const {
  std::vector<std::size_t> out;
  for (const auto& tree : trees_) {
    const auto used = tree.used_features();
    out.insert(out.end(), used.begin(), used.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BaggedEnsemble fit_balanced_bagging(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                                    const EnsembleConfig& config) {
  return fit_bagged(EnsembleKind::kBalancedBagging, x, y, config);
}

BaggedEnsemble fit_balanced_bagging(const DataTable& table,
                                    std::span<const std::size_t> train_idx,
                                    const EnsembleConfig& config) {
  const auto features = table.feature_columns();
  auto model = fit_balanced_bagging(to_matrix(table, train_idx, features),
                                    table.labels(train_idx), config);
  model.feature_names = table.column_names(features);
  return model;
}

BaggedEnsemble fit_random_forest(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                                 const EnsembleConfig& config) {
  return fit_bagged(EnsembleKind::kRandomForest, x, y, config);
}

BaggedEnsemble fit_random_forest(const DataTable& table,
                                 std::span<const std::size_t> train_idx,
                                 const EnsembleConfig& config) {
  const auto features = table.feature_columns();
  auto model = fit_random_forest(to_matrix(table, train_idx, features),
                                 table.labels(train_idx), config);
  model.feature_names = table.column_names(features);
  return model;
}

// ---------------------------------------------------------------------------

ParameterGrid ParameterGrid::desk() {
  return ParameterGrid{{20, 50, 100}, {0.5, 0.8, 1.0}, {true}, {false}};
}

ParameterGrid ParameterGrid::full() {
  return ParameterGrid{
      {20, 50, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000, 1200},
      {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.90, 0.92, 0.95, 1.0},
      {true, false},
      {true, false}};
}

std::vector<EnsembleConfig> ParameterGrid::expand(const EnsembleConfig& base) const {
  std::vector<EnsembleConfig> out;
  for (auto n : n_estimators) {
    for (auto mf : max_features) {
      for (bool bs : bootstrap) {
        for (bool bf : bootstrap_features) {
          EnsembleConfig c = base;
          c.n_estimators = n;
          c.max_features = mf;
          c.bootstrap = bs;
          c.bootstrap_features = bf;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

std::vector<RowIndices> stratified_folds(std::span<const std::uint8_t> y, std::size_t folds,
                                         std::uint64_t seed) {
  if (folds < 2) throw ArgumentError("cross-validation needs at least 2 folds");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i] ? 1 : 0].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < folds) {
      throw DataError("class " + std::to_string(c) + " has only " +
                      std::to_string(by_class[c].size()) + " rows for " +
                      std::to_string(folds) + " folds; use fewer folds");
    }
  }
  Rng rng(seed);
  std::vector<RowIndices> out(folds);
  for (auto& rows : by_class) {
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t i = 0; i < rows.size(); ++i) out[i % folds].push_back(rows[i]);
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

GridSearchResult grid_search_cv(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                                const ParameterGrid& grid, const EnsembleConfig& base,
                                std::size_t folds, std::uint64_t seed, std::size_t threads) {
  const auto configs = grid.expand(base);
  if (configs.empty()) throw ArgumentError("grid search needs a non-empty grid");
  const auto held_out = stratified_folds(y, folds, seed);

  struct FoldData {
    FeatureMatrix x_train, x_test;
    std::vector<std::uint8_t> y_train, y_test;
  };
  std::vector<FoldData> data(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::uint8_t> in_test(y.size(), 0);
    for (auto r : held_out[f]) in_test[r] = 1;
    std::vector<Eigen::Index> train_rows, test_rows;
    for (std::size_t r = 0; r < y.size(); ++r) {
      (in_test[r] ? test_rows : train_rows).push_back(static_cast<Eigen::Index>(r));
    }
    data[f].x_train = x(train_rows, Eigen::all);
    data[f].x_test = x(test_rows, Eigen::all);
    for (auto r : train_rows) data[f].y_train.push_back(y[static_cast<std::size_t>(r)]);
    for (auto r : test_rows) data[f].y_test.push_back(y[static_cast<std::size_t>(r)]);
  }

  GridSearchResult result;
  result.points.resize(configs.size());
  for (std::size_t p = 0; p < configs.size(); ++p) {
    result.points[p].config = configs[p];
    result.points[p].fold_scores.assign(folds, 0.0);
  }
  parallel_for(configs.size() * folds, threads, [&](std::size_t task) {
    const std::size_t p = task / folds;
    const std::size_t f = task % folds;
    EnsembleConfig config = configs[p];
    config.threads = 1;
    const auto model = fit_balanced_bagging(data[f].x_train, data[f].y_train, config);
    result.points[p].fold_scores[f] = roc_auc(data[f].y_test, model.predict_proba(data[f].x_test));
  });

  for (auto& point : result.points) {
    double sum = 0.0;
    for (double s : point.fold_scores) sum += s;
    point.mean_score = sum / static_cast<double>(folds);
  }
  std::size_t best = 0;
  for (std::size_t p = 1; p < result.points.size(); ++p) {
    const auto& a = result.points[p];
    const auto& b = result.points[best];
    if (a.mean_score > b.mean_score ||
        (a.mean_score == b.mean_score &&
         (a.config.n_estimators < b.config.n_estimators ||
          (a.config.n_estimators == b.config.n_estimators &&
           a.config.max_features < b.config.max_features)))) {
      best = p;
    }
  }
  result.best_index = best;
  result.best = result.points[best].config;
  return result;
}

GridSearchResult grid_search_cv(const DataTable& table,
                                std::span<const std::size_t> train_idx,
                                const ParameterGrid& grid, const EnsembleConfig& base,
                                std::size_t folds, std::uint64_t seed, std::size_t threads) {
  const auto features = table.feature_columns();
  return grid_search_cv(to_matrix(table, train_idx, features), table.labels(train_idx), grid,
                        base, folds, seed, threads);
}

}  // namespace backorder
