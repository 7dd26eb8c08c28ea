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

#include "backorder/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "backorder/error.hpp"
#include "backorder/random.hpp"

namespace backorder {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RidgeFit {
  Eigen::VectorXd coefficients;  // raw units, one per predictor column
  double intercept = 0.0;
};

// Ridge regression of column `target` of `w` on every other column, using the
// rows flagged in `use`. Predictors are standardized over those rows; the
// intercept is not penalized.
RidgeFit ridge_fit(const Eigen::MatrixXd& w, Eigen::Index target,
                   const std::vector<std::uint8_t>& use, double lambda) {
  const Eigen::Index p = w.cols() - 1;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (use[static_cast<std::size_t>(i)]) rows.push_back(i);
  }
  const auto n = static_cast<Eigen::Index>(rows.size());

  Eigen::MatrixXd z(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      if (c == target) continue;
      z(r, k++) = w(rows[static_cast<std::size_t>(r)], c);
    }
    y(r) = w(rows[static_cast<std::size_t>(r)], target);
  }

  const Eigen::VectorXd mu = z.colwise().mean().transpose();
  Eigen::VectorXd sd(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const double var = (z.col(k).array() - mu(k)).square().mean();
    sd(k) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  for (Eigen::Index k = 0; k < p; ++k) z.col(k) = (z.col(k).array() - mu(k)) / sd(k);
  const double y_mean = y.mean();

  Eigen::MatrixXd gram = z.transpose() * z;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd beta = gram.ldlt().solve(z.transpose() * (y.array() - y_mean).matrix());

  RidgeFit fit;
  fit.coefficients = beta.array() / sd.array();
  fit.intercept = y_mean - fit.coefficients.dot(mu);
  return fit;
}

double predict_row(const Eigen::MatrixXd& w, Eigen::Index row, Eigen::Index target,
                   const std::vector<double>& coefficients, double intercept) {
  double acc = intercept;
  std::size_t k = 0;
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    if (c == target) continue;
    acc += coefficients[k++] * w(row, c);
  }
  return acc;
}

}  // namespace

ImputerModel fit_iterative_imputer(const DataTable& table,
                                   std::span<const std::size_t> train_idx,
                                   const ImputerOptions& options) {
  if (options.max_rounds < 1) throw ArgumentError("imputer max_rounds must be >= 1");
  if (!(options.tol >= 0.0)) throw ArgumentError("imputer tol must be non-negative");
  if (train_idx.empty()) throw ArgumentError("imputer needs at least one train row");

  const auto cols = table.numeric_columns();
  const auto n = static_cast<Eigen::Index>(train_idx.size());
  const auto m = static_cast<Eigen::Index>(cols.size());
  if (m == 0) throw DataError("imputer needs at least one numeric column");

  ImputerModel model;
  model.columns = table.column_names(cols);
  model.max_rounds = options.max_rounds;
  model.tol = options.tol;
  model.ridge = options.ridge;
  model.means.resize(cols.size());
  model.lower.resize(cols.size());
  model.upper.resize(cols.size());

  Eigen::MatrixXd w(n, m);
  std::vector<std::vector<std::uint8_t>> observed(cols.size(),
                                                  std::vector<std::uint8_t>(train_idx.size()));
  bool any_complete = false;
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& col = table.column(cols[static_cast<std::size_t>(j)]);
    double sum = 0.0;
    std::size_t count = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t r = train_idx[static_cast<std::size_t>(i)];
      if (!col.missing.at(r)) {
        const double v = col.values[r];
        observed[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 1;
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        ++count;
      }
    }
    if (count == 0) {
      throw DataError("column '" + model.columns[static_cast<std::size_t>(j)] +
                      "' is entirely missing in the training rows");
    }
    if (count == train_idx.size()) any_complete = true;
    const double mean = sum / static_cast<double>(count);
    model.means[static_cast<std::size_t>(j)] = mean;
    model.lower[static_cast<std::size_t>(j)] = lo;
    model.upper[static_cast<std::size_t>(j)] = hi;
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t r = train_idx[static_cast<std::size_t>(i)];
      w(i, j) = col.missing[r] ? mean : col.values[r];
    }
  }
  if (!any_complete) {
    throw DataError("imputer needs at least one fully observed numeric column");
  }

  std::vector<Eigen::Index> incomplete;
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& obs = observed[static_cast<std::size_t>(j)];
    if (std::find(obs.begin(), obs.end(), 0) != obs.end()) incomplete.push_back(j);
  }

  if (!incomplete.empty() && m > 1) {
    for (std::size_t round = 0; round < options.max_rounds; ++round) {
      double max_change = 0.0;
      for (const Eigen::Index j : incomplete) {
        const auto& obs = observed[static_cast<std::size_t>(j)];
        const RidgeFit fit = ridge_fit(w, j, obs, options.ridge);
        const std::vector<double> coef(fit.coefficients.data(),
                                       fit.coefficients.data() + fit.coefficients.size());
        for (Eigen::Index i = 0; i < n; ++i) {
          if (obs[static_cast<std::size_t>(i)]) continue;
          const double predicted = std::clamp(
              predict_row(w, i, j, coef, fit.intercept),
              model.lower[static_cast<std::size_t>(j)],
              model.upper[static_cast<std::size_t>(j)]);
          max_change = std::max(max_change, std::abs(predicted - w(i, j)));
          w(i, j) = predicted;
        }
      }
      model.round_max_change.push_back(max_change);
      model.rounds = round + 1;
      if (max_change < options.tol) {
        model.converged = true;
        break;
      }
    }
  } else {
    model.converged = true;
  }

  const auto& changes = model.round_max_change;
  if (changes.size() >= 3) {
    const std::size_t k = changes.size();
    model.contraction_ok = changes[k - 1] <= changes[k - 2] && changes[k - 2] <= changes[k - 3];
  }

  // Final regressions for every numeric column so that unseen tables can be
  // imputed even in columns complete during training.
  for (Eigen::Index j = 0; j < m; ++j) {
    ColumnRegression reg;
    reg.column = model.columns[static_cast<std::size_t>(j)];
    for (Eigen::Index c = 0; c < m; ++c) {
      if (c != j) reg.predictors.push_back(model.columns[static_cast<std::size_t>(c)]);
    }
    if (m > 1) {
      const RidgeFit fit = ridge_fit(w, j, observed[static_cast<std::size_t>(j)], options.ridge);
      reg.coefficients.assign(fit.coefficients.data(),
                              fit.coefficients.data() + fit.coefficients.size());
      reg.intercept = fit.intercept;
    } else {
      reg.intercept = model.means[static_cast<std::size_t>(j)];
    }
    model.regressions.push_back(std::move(reg));
  }
  return model;
}

ImputerModel fit_iterative_imputer(const DataTable& table,
                                   std::span<const std::size_t> train_idx,
                                   std::size_t max_rounds, double tol) {
  ImputerOptions options;
  options.max_rounds = max_rounds;
  options.tol = tol;
  return fit_iterative_imputer(table, train_idx, options);
}

DataTable impute(const ImputerModel& model, const DataTable& table) {
  const auto m = static_cast<Eigen::Index>(model.columns.size());
  std::vector<std::size_t> cols;
  for (const auto& name : model.columns) cols.push_back(table.column_index(name));

  bool any_missing = false;
  for (auto c : cols) {
    const auto& miss = table.column(c).missing;
    if (std::find(miss.begin(), miss.end(), 1) != miss.end()) any_missing = true;
  }
  if (!any_missing) return table;

  const auto n = static_cast<Eigen::Index>(table.row_count());
  Eigen::MatrixXd w(n, m);
  std::vector<Eigen::Index> incomplete;
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& col = table.column(cols[static_cast<std::size_t>(j)]);
    bool has_missing = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto r = static_cast<std::size_t>(i);
      if (col.missing[r]) {
        w(i, j) = model.means[static_cast<std::size_t>(j)];
        has_missing = true;
      } else {
        w(i, j) = col.values[r];
      }
    }
    if (has_missing) incomplete.push_back(j);
  }

  if (m > 1) {
    for (std::size_t round = 0; round < model.max_rounds; ++round) {
      double max_change = 0.0;
      for (const Eigen::Index j : incomplete) {
        const auto& reg = model.regressions[static_cast<std::size_t>(j)];
        const auto& miss = table.column(cols[static_cast<std::size_t>(j)]).missing;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (!miss[static_cast<std::size_t>(i)]) continue;
          const double predicted =
              std::clamp(predict_row(w, i, j, reg.coefficients, reg.intercept),
                         model.lower[static_cast<std::size_t>(j)],
                         model.upper[static_cast<std::size_t>(j)]);
          max_change = std::max(max_change, std::abs(predicted - w(i, j)));
          w(i, j) = predicted;
        }
      }
      if (max_change < model.tol) break;
    }
  }

  std::vector<Column> out = table.columns();
  for (const Eigen::Index j : incomplete) {
    auto& col = out[cols[static_cast<std::size_t>(j)]];
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto r = static_cast<std::size_t>(i);
      if (col.missing[r]) {
        col.values[r] = w(i, j);
        col.missing[r] = 0;
      }
    }
  }
  return DataTable(table.schema(), std::move(out));
}

// ---------------------------------------------------------------------------

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::kRobust:
      return "robust";
    case TransformKind::kLogStandard:
      return "log-standard";
    case TransformKind::kQuantile:
      return "quantile";
    case TransformKind::kStandard:
      return "standard";
  }
  return "unknown";
}

TransformKind parse_transform_kind(std::string_view name) {
  if (name == "robust") return TransformKind::kRobust;
  if (name == "log-standard" || name == "log_standard") return TransformKind::kLogStandard;
  if (name == "quantile") return TransformKind::kQuantile;
  if (name == "standard") return TransformKind::kStandard;
  throw ArgumentError("unknown transform kind '" + std::string(name) + "'");
}

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ArgumentError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double ColumnTransform::apply(TransformKind kind, double x) const {
  switch (kind) {
    case TransformKind::kRobust:
    case TransformKind::kStandard:
      return (x - center) / scale;
    case TransformKind::kLogStandard: {
      // Values below zero never reach the log: the column was fit on x >= 0.
      const double v = log_applied ? std::log1p(std::max(x, 0.0)) : x;
      return (v - center) / scale;
    }
    case TransformKind::kQuantile: {
      const auto& q = quantiles;
      const auto& ref = references;
      if (q.empty()) return 0.0;
      if (x <= q.front()) return ref.front();
      if (x >= q.back()) return ref.back();
      const auto lo_it = std::lower_bound(q.begin(), q.end(), x);
      const auto hi_it = std::upper_bound(q.begin(), q.end(), x);
      const auto lo = static_cast<std::size_t>(lo_it - q.begin());
      const auto hi = static_cast<std::size_t>(hi_it - q.begin());
      if (lo < hi) {
        // x equals one or more quantile values: average the reference span.
        return 0.5 * (ref[lo] + ref[hi - 1]);
      }
      const std::size_t a = lo - 1;
      return ref[a] + (x - q[a]) / (q[lo] - q[a]) * (ref[lo] - ref[a]);
    }
  }
  return x;
}

const ColumnTransform* FittedTransform::find(std::string_view column) const {
  for (const auto& c : columns) {
    if (c.column == column) return &c;
  }
  return nullptr;
}

FittedTransform fit_transform(TransformKind kind, const DataTable& table,
                              std::span<const std::size_t> train_idx,
                              std::span<const std::size_t> columns) {
  FittedTransform out;
  out.kind = kind;
  for (const std::size_t c : columns) {
    const auto& spec = table.schema().at(c);
    if (spec.kind != ColumnKind::kNumeric) {
      throw ArgumentError("column '" + spec.name + "' is not numeric");
    }
    const auto& col = table.column(c);
    std::vector<double> v;
    v.reserve(train_idx.size());
    for (auto r : train_idx) {
      if (!col.missing.at(r)) v.push_back(col.values[r]);
    }
    if (v.empty()) {
      throw DataError("column '" + spec.name + "' has no observed training values");
    }

    ColumnTransform t;
    t.column = spec.name;
    auto mean_std = [](const std::vector<double>& xs) {
      double sum = 0.0;
      for (double x : xs) sum += x;
      const double mean = sum / static_cast<double>(xs.size());
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      return std::pair{mean, std::sqrt(ss / static_cast<double>(xs.size()))};
    };

    switch (kind) {
      case TransformKind::kRobust: {
        std::sort(v.begin(), v.end());
        t.center = sorted_quantile(v, 0.5);
        t.scale = sorted_quantile(v, 0.75) - sorted_quantile(v, 0.25);
        break;
      }
      case TransformKind::kStandard: {
        std::tie(t.center, t.scale) = mean_std(v);
        break;
      }
      case TransformKind::kLogStandard: {
        const double lo = *std::min_element(v.begin(), v.end());
        t.log_applied = lo >= 0.0;
        if (t.log_applied) {
          for (double& x : v) x = std::log1p(x);
        }
        std::tie(t.center, t.scale) = mean_std(v);
        break;
      }
      case TransformKind::kQuantile: {
        std::sort(v.begin(), v.end());
        const std::size_t k = std::min(kMaxQuantiles, v.size());
        t.center = 0.0;
        if (k == 1) {
          t.quantiles = {v.front()};
          t.references = {0.0};
        } else {
          for (std::size_t i = 0; i < k; ++i) {
            const double p = static_cast<double>(i) / static_cast<double>(k - 1);
            t.references.push_back(p);
            t.quantiles.push_back(sorted_quantile(v, p));
          }
        }
        t.degenerate = v.front() == v.back();
        break;
      }
    }
    if (kind != TransformKind::kQuantile && !(t.scale > 0.0)) {
      t.scale = 1.0;
      t.degenerate = true;
    }
    out.columns.push_back(std::move(t));
  }
  return out;
}

DataTable apply_transform(const FittedTransform& transform, const DataTable& table) {
  std::vector<Column> cols = table.columns();
  for (const auto& t : transform.columns) {
    auto& col = cols[table.column_index(t.column)];
    for (std::size_t r = 0; r < col.values.size(); ++r) {
      if (!col.missing[r]) col.values[r] = t.apply(transform.kind, col.values[r]);
    }
  }
  return DataTable(table.schema(), std::move(cols));
}

// ---------------------------------------------------------------------------

SmoteResult smote(const DataTable& table, std::span<const std::size_t> train_idx,
                  std::size_t k_neighbors, double target_ratio, std::uint64_t seed) {
  if (k_neighbors < 1) throw ArgumentError("SMOTE needs k_neighbors >= 1");
  if (!(target_ratio > 0.0) || !std::isfinite(target_ratio)) {
    throw ArgumentError("SMOTE target_ratio must be positive");
  }
  const auto y = table.labels(train_idx);
  const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  const std::size_t negatives = y.size() - positives;
  const std::uint8_t minority_label = positives <= negatives ? 1 : 0;

  std::vector<std::size_t> minority;
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    if (y[i] == minority_label) minority.push_back(train_idx[i]);
  }
  const std::size_t n_min = minority.size();
  const std::size_t n_maj = y.size() - n_min;
  if (n_maj == 0) throw DataError("SMOTE needs both classes in the training rows");
  if (n_min <= k_neighbors) {
    throw DataError("SMOTE: minority class has " + std::to_string(n_min) +
                    " training rows; choose k_neighbors < " + std::to_string(n_min));
  }

  const auto numeric = table.numeric_columns();
  for (auto c : numeric) {
    for (auto r : minority) {
      if (table.is_missing(c, r)) {
        throw DataError("SMOTE: missing value in column '" + table.schema()[c].name +
                        "'; impute first");
      }
    }
  }

  const FittedTransform scaler =
      fit_transform(TransformKind::kRobust, table, train_idx, numeric);
  Eigen::MatrixXd scaled(static_cast<Eigen::Index>(n_min),
                         static_cast<Eigen::Index>(numeric.size()));
  for (std::size_t j = 0; j < numeric.size(); ++j) {
    const auto& t = scaler.columns[j];
    for (std::size_t i = 0; i < n_min; ++i) {
      scaled(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          t.apply(TransformKind::kRobust, table.values(numeric[j])[minority[i]]);
    }
  }

  // k nearest minority neighbors of every minority row; ties by position.
  std::vector<std::vector<std::size_t>> neighbors(n_min);
  std::vector<std::pair<double, std::size_t>> dist(n_min);
  for (std::size_t i = 0; i < n_min; ++i) {
    for (std::size_t j = 0; j < n_min; ++j) {
      dist[j] = {j == i ? std::numeric_limits<double>::infinity()
                        : (scaled.row(static_cast<Eigen::Index>(i)) -
                           scaled.row(static_cast<Eigen::Index>(j)))
                              .squaredNorm(),
                 j};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k_neighbors),
                      dist.end());
    for (std::size_t k = 0; k < k_neighbors; ++k) neighbors[i].push_back(dist[k].second);
  }

  const double wanted = std::ceil(target_ratio * static_cast<double>(n_maj) - 1e-9);
  const std::size_t n_synthetic =
      wanted > static_cast<double>(n_min) ? static_cast<std::size_t>(wanted) - n_min : 0;

  SmoteResult result;
  result.minority_label = minority_label;
  result.original_rows = train_idx.size();
  Rng rng(seed);
  for (std::size_t s = 0; s < n_synthetic; ++s) {
    const std::size_t base = rng.index(n_min);
    const std::size_t nb = neighbors[base][rng.index(k_neighbors)];
    const double lambda = rng.uniform();
    result.synthetic.push_back({minority[base], minority[nb], lambda});
  }

  std::vector<Column> cols(table.column_count());
  const auto& schema = table.schema();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto& src = table.column(c);
    auto& dst = cols[c];
    dst.values.reserve(train_idx.size() + n_synthetic);
    dst.missing.reserve(train_idx.size() + n_synthetic);
    for (auto r : train_idx) {
      dst.values.push_back(src.values[r]);
      dst.missing.push_back(src.missing[r]);
    }
    for (const auto& o : result.synthetic) {
      double v;
      std::uint8_t miss = 0;
      if (schema[c].kind == ColumnKind::kNumeric) {
        const double p = src.values[o.base_row];
        const double q = src.values[o.neighbor_row];
        v = p + o.lambda * (q - p);
      } else if (schema[c].kind == ColumnKind::kTarget) {
        v = static_cast<double>(minority_label);
      } else {
        v = src.values[o.base_row];
        miss = src.missing[o.base_row];
      }
      dst.values.push_back(v);
      dst.missing.push_back(miss);
    }
  }
  result.table = DataTable(schema, std::move(cols));
  return result;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd PcaModel::project(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd z = x;
  for (Eigen::Index j = 0; j < z.cols(); ++j) z.col(j) = (z.col(j).array() - mean(j)) / scale(j);
  return z * loadings.transpose();
}

PcaModel fit_pca(const DataTable& table, std::span<const std::size_t> train_idx,
                 double variance_target, std::span<const std::size_t> columns) {
  if (train_idx.size() < 2) throw DataError("PCA needs at least 2 rows");
  if (!(variance_target > 0.0 && variance_target <= 1.0)) {
    throw ArgumentError("variance_target must lie in (0, 1]");
  }
  if (columns.empty()) throw ArgumentError("PCA needs at least one column");

  Eigen::MatrixXd x = to_matrix(table, train_idx, columns);
  const auto n = x.rows();
  const auto p = x.cols();

  PcaModel model;
  model.features = table.column_names(columns);
  model.mean = x.colwise().mean().transpose();
  model.scale.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    x.col(j).array() -= model.mean(j);
    const double sd = std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n));
    model.scale(j) = sd > 0.0 ? sd : 1.0;
    x.col(j) /= model.scale(j);
  }
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericalError("PCA eigendecomposition failed");

  // Eigen returns ascending eigenvalues.
  std::vector<double> eigenvalues(static_cast<std::size_t>(p));
  Eigen::MatrixXd vectors(p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const Eigen::Index src = p - 1 - k;
    eigenvalues[static_cast<std::size_t>(k)] = std::max(0.0, solver.eigenvalues()(src));
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    vectors.row(k) = v.transpose();
  }
  const double total = std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
  model.explained_variance_ratio.resize(eigenvalues.size(), 0.0);
  if (total > 0.0) {
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
      model.explained_variance_ratio[k] = eigenvalues[k] / total;
    }
  }

  double cumulative = 0.0;
  model.n_components = static_cast<std::size_t>(p);
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    cumulative += model.explained_variance_ratio[k];
    if (cumulative >= variance_target - 1e-12) {
      model.n_components = k + 1;
      break;
    }
  }
  const auto kept = static_cast<Eigen::Index>(model.n_components);
  model.loadings = vectors.topRows(kept);

  model.feature_importance.assign(static_cast<std::size_t>(p), 0.0);
  for (Eigen::Index k = 0; k < kept; ++k) {
    for (Eigen::Index j = 0; j < p; ++j) {
      model.feature_importance[static_cast<std::size_t>(j)] +=
          model.explained_variance_ratio[static_cast<std::size_t>(k)] *
          std::abs(model.loadings(k, j));
    }
  }
  const double norm =
      std::accumulate(model.feature_importance.begin(), model.feature_importance.end(), 0.0);
  if (norm > 0.0) {
    for (double& f : model.feature_importance) f /= norm;
  }
  return model;
}

}  // namespace backorder
