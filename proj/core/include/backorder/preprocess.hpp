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

#ifndef BACKORDER_PREPROCESS_HPP_
#define BACKORDER_PREPROCESS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "backorder/dataset.hpp"

namespace backorder {

// ---------------------------------------------------------------------------
// Iterative (round-robin regression) imputation.
// ---------------------------------------------------------------------------

struct ImputerOptions {
  std::size_t max_rounds = 10;
  double tol = 1e-3;
  // L2 penalty on standardized predictors.
  double ridge = 1e-3;
};

// Linear model predicting one numeric column from all other numeric columns,
// expressed in raw (unstandardized) units.
struct ColumnRegression {
  std::string column;
  std::vector<std::string> predictors;
  std::vector<double> coefficients;
  double intercept = 0.0;
};

struct ImputerModel {
  std::vector<std::string> columns;  // numeric columns, schema order
  std::vector<double> means;         // initial fill, train observed rows
  std::vector<double> lower;         // clip range, train observed min
  std::vector<double> upper;         // clip range, train observed max
  std::vector<ColumnRegression> regressions;  // one per column
  std::size_t max_rounds = 10;
  double tol = 1e-3;
  double ridge = 1e-3;
  // Fit-time diagnostics.
  std::size_t rounds = 0;
  bool converged = false;
  std::vector<double> round_max_change;
  // False when the imputed-cell change grew during the last three rounds.
  bool contraction_ok = true;
};

// Round-robin ridge imputation fit on `train_idx` only. Missing cells start at
// the column mean; each incomplete column is then regressed on the others and
// its missing cells re-predicted (clipped to the observed range) until the
// largest change is below `tol` or `max_rounds` is reached.
ImputerModel fit_iterative_imputer(const DataTable& table,
                                   std::span<const std::size_t> train_idx,
                                   const ImputerOptions& options = {});
ImputerModel fit_iterative_imputer(const DataTable& table,
                                   std::span<const std::size_t> train_idx,
                                   std::size_t max_rounds, double tol);

// Fills missing numeric cells using the stored regressions. Tables without
// missing numeric cells come back unchanged.
DataTable impute(const ImputerModel& model, const DataTable& table);

// ---------------------------------------------------------------------------
// Scaling regimes.
// ---------------------------------------------------------------------------

enum class TransformKind { kRobust, kLogStandard, kQuantile, kStandard };

std::string_view to_string(TransformKind kind);
TransformKind parse_transform_kind(std::string_view name);

struct ColumnTransform {
  std::string column;
  double center = 0.0;
  double scale = 1.0;
  // Scale divisor replaced by 1 because the spread was zero.
  bool degenerate = false;
  // kLogStandard only: false when the train minimum was negative and the
  // column was standardized without the log.
  bool log_applied = false;
  // kQuantile only: train quantile values and their reference probabilities.
  std::vector<double> quantiles;
  std::vector<double> references;

  double apply(TransformKind kind, double x) const;
};

struct FittedTransform {
  TransformKind kind = TransformKind::kStandard;
  std::vector<ColumnTransform> columns;

  const ColumnTransform* find(std::string_view column) const;
};

inline constexpr std::size_t kMaxQuantiles = 1000;

// robust:       (x - median) / (q75 - q25)
// log-standard: (log1p(x) - mean) / std, moments taken after the log
// quantile:     train empirical CDF, linearly interpolated, onto [0, 1]
// standard:     (x - mean) / std
// Missing cells are ignored when fitting and left missing when applying.
FittedTransform fit_transform(TransformKind kind, const DataTable& table,
                              std::span<const std::size_t> train_idx,
                              std::span<const std::size_t> columns);

DataTable apply_transform(const FittedTransform& transform, const DataTable& table);

// Type-7 (linear interpolation) sample quantile of sorted data.
double sorted_quantile(std::span<const double> sorted, double p);

// ---------------------------------------------------------------------------
// SMOTE.
// ---------------------------------------------------------------------------

struct SyntheticOrigin {
  std::size_t base_row;      // row index in the input table
  std::size_t neighbor_row;  // row index in the input table
  double lambda;             // position on the segment base -> neighbor
};

struct SmoteResult {
  // Training rows (in train_idx order) followed by the synthetic rows.
  DataTable table;
  std::size_t original_rows = 0;
  std::uint8_t minority_label = 1;
  std::vector<SyntheticOrigin> synthetic;
};

// Oversamples the training minority class until minority/majority reaches
// `target_ratio`. Neighbors are found by Euclidean distance on robust-scaled
// numeric columns; yes/no flags are copied from the base row.
SmoteResult smote(const DataTable& table, std::span<const std::size_t> train_idx,
                  std::size_t k_neighbors, double target_ratio, std::uint64_t seed);

// ---------------------------------------------------------------------------
// PCA.
// ---------------------------------------------------------------------------

struct PcaModel {
  std::vector<std::string> features;
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  // Retained components (rows) x features; rows are orthonormal.
  Eigen::MatrixXd loadings;
  // Full spectrum, non-increasing.
  std::vector<double> explained_variance_ratio;
  std::size_t n_components = 0;
  // Sum over retained components of ratio * |loading|, normalized to 1.
  std::vector<double> feature_importance;

  Eigen::MatrixXd project(const Eigen::MatrixXd& x) const;
};

// Standardizes the selected columns on the train rows, eigendecomposes their
// covariance and keeps the fewest components reaching `variance_target`.
PcaModel fit_pca(const DataTable& table, std::span<const std::size_t> train_idx,
                 double variance_target, std::span<const std::size_t> columns);

}  // namespace backorder

#endif  // BACKORDER_PREPROCESS_HPP_
