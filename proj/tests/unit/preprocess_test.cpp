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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "backorder/dataset.hpp"
#include "backorder/error.hpp"
#include "backorder/preprocess.hpp"
#include "backorder/random.hpp"
#include "support.hpp"

namespace backorder {
namespace {

using testing::kNaN;
using testing::make_table;

// --- imputer -------------------------------------------------------------

TEST(ImputerTest, NoMissingIsIdentity) {
  const auto t = generate_synthetic({.n_rows = 300, .positive_rate = 0.1, .seed = 1,
                                     .missing_rate = 0.0});
  ASSERT_EQ(t.missing_count(), 0u);
  const auto rows = all_rows(t);
  const auto model = fit_iterative_imputer(t, rows);
  EXPECT_TRUE(impute(model, t) == t);
}

TEST(ImputerTest, LinearRelationRecovered) {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(i);
    y.push_back(2.0 * i);
  }
  y[3] = kNaN;  // x = 3
  Labels target(20, 0);
  target[0] = 1;
  const auto t = make_table({x, y}, target);
  const auto rows = all_rows(t);
  const auto model = fit_iterative_imputer(t, rows, 50, 1e-9);
  const auto filled = impute(model, t);
  EXPECT_NEAR(filled.values(1)[3], 6.0, 0.1);
  EXPECT_FALSE(filled.is_missing(1, 3));
  EXPECT_EQ(filled.missing_count(), 0u);
}

TEST(ImputerTest, ImputedValuesStayInObservedRange) {
  const auto t = generate_synthetic({.n_rows = 3000, .positive_rate = 0.05, .seed = 2,
                                     .missing_rate = 0.06});
  const auto s = split(t, 0.8, 2, true);
  const auto model = fit_iterative_imputer(t, s.train);
  const auto filled = impute(model, t);
  for (std::size_t j = 0; j < model.columns.size(); ++j) {
    const auto c = t.column_index(model.columns[j]);
    for (std::size_t r = 0; r < t.row_count(); ++r) {
      if (!t.is_missing(c, r)) continue;
      const double v = filled.values(c)[r];
      ASSERT_GE(v, model.lower[j]);
      ASSERT_LE(v, model.upper[j]);
    }
  }
  EXPECT_GE(model.rounds, 1u);
  EXPECT_LE(model.rounds, model.max_rounds);
  EXPECT_EQ(model.round_max_change.size(), model.rounds);
}

TEST(ImputerTest, Errors) {
  const auto all_missing = make_table({{1, 2, 3}, {kNaN, kNaN, kNaN}}, {0, 1, 0});
  const auto rows = all_rows(all_missing);
  EXPECT_THROW(fit_iterative_imputer(all_missing, rows), DataError);
  const auto none_complete = make_table({{1, kNaN, 3}, {kNaN, 2, 3}}, {0, 1, 0});
  EXPECT_THROW(fit_iterative_imputer(none_complete, rows), DataError);
  const auto ok = make_table({{1, 2, 3}, {1, kNaN, 3}}, {0, 1, 0});
  EXPECT_THROW(fit_iterative_imputer(ok, rows, 0, 1e-3), ArgumentError);
}

// --- transforms ----------------------------------------------------------

TEST(TransformTest, RobustHandValues) {
  const auto t = make_table({{1, 2, 3, 4, 5}}, {0, 1, 0, 1, 0});
  const auto rows = all_rows(t);
  const std::vector<std::size_t> cols = {0};
  const auto f = fit_transform(TransformKind::kRobust, t, rows, cols);
  EXPECT_DOUBLE_EQ(f.columns[0].center, 3.0);
  EXPECT_DOUBLE_EQ(f.columns[0].scale, 2.0);
  EXPECT_DOUBLE_EQ(apply_transform(f, t).values(0)[4], 1.0);
}

TEST(TransformTest, ConstantColumnCentersToZero) {
  const auto t = make_table({{7, 7, 7, 7}}, {0, 1, 0, 1});
  const auto rows = all_rows(t);
  const std::vector<std::size_t> cols = {0};
  for (auto kind : {TransformKind::kRobust, TransformKind::kLogStandard,
                    TransformKind::kQuantile, TransformKind::kStandard}) {
    const auto f = fit_transform(kind, t, rows, cols);
    const auto out = apply_transform(f, t);
    for (double v : out.values(0)) EXPECT_EQ(v, 0.0) << to_string(kind);
  }
}

TEST(TransformTest, LogStandardTwoPoint) {
  const auto t = make_table({{0.0, std::exp(1.0) - 1.0}}, {0, 1});
  const auto rows = all_rows(t);
  const std::vector<std::size_t> cols = {0};
  const auto f = fit_transform(TransformKind::kLogStandard, t, rows, cols);
  EXPECT_TRUE(f.columns[0].log_applied);
  const auto out = apply_transform(f, t);
  // logs are {0, 1}: mean 0.5, population std 0.5.
  EXPECT_NEAR(out.values(0)[0], -1.0, 1e-12);
  EXPECT_NEAR(out.values(0)[1], 1.0, 1e-12);
}

TEST(TransformTest, LogStandardSkipsNegativeColumns) {
  const auto t = make_table({{-1.0, 0.0, 1.0}}, {0, 1, 0});
  const auto rows = all_rows(t);
  const std::vector<std::size_t> cols = {0};
  const auto f = fit_transform(TransformKind::kLogStandard, t, rows, cols);
  EXPECT_FALSE(f.columns[0].log_applied);
  EXPECT_NEAR(apply_transform(f, t).values(0)[1], 0.0, 1e-12);
}

TEST(TransformTest, StandardMoments) {
  Rng rng(4);
  std::vector<double> x(1000);
  for (auto& v : x) v = 3.0 + 2.0 * rng.normal();
  const auto t = make_table({x}, Labels(1000, 0));
  const auto rows = all_rows(t);
  const std::vector<std::size_t> cols = {0};
  const auto out = apply_transform(fit_transform(TransformKind::kStandard, t, rows, cols), t);
  double mean = 0, sq = 0;
  for (double v : out.values(0)) mean += v;
  mean /= 1000;
  for (double v : out.values(0)) sq += (v - mean) * (v - mean);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(sq / 1000, 1.0, 1e-12);
}

TEST(TransformTest, QuantileOfTrainIsUniform) {
  Rng rng(8);
  const std::size_t n = 6000;
  std::vector<double> x(n);
  for (auto& v : x) v = std::exp(2.0 * rng.normal());
  const auto t = make_table({x}, Labels(n, 0));
  const auto rows = all_rows(t);
  const std::vector<std::size_t> cols = {0};
  const auto out = apply_transform(fit_transform(TransformKind::kQuantile, t, rows, cols), t);
  std::vector<double> u(out.values(0).begin(), out.values(0).end());
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ks = std::max(ks, std::max(std::abs(u[i] - double(i) / n), std::abs(u[i] - double(i + 1) / n)));
    ASSERT_GE(u[i], 0.0);
    ASSERT_LE(u[i], 1.0);
  }
  EXPECT_LT(ks, 0.02);
}

TEST(TransformTest, MissingCellsStayMissing) {
  const auto t = make_table({{1, kNaN, 3, 4}}, {0, 1, 0, 1});
  const auto rows = all_rows(t);
  const std::vector<std::size_t> cols = {0};
  const auto out = apply_transform(fit_transform(TransformKind::kRobust, t, rows, cols), t);
  EXPECT_TRUE(out.is_missing(0, 1));
}

// Fitting reads only train rows: permuting or deleting test rows leaves the
// parameters bit-identical.
TEST(TransformTest, LeakageGuard) {
  const auto t = generate_synthetic({.n_rows = 2000, .positive_rate = 0.05, .seed = 6});
  const auto s = split(t, 0.8, 6, true);
  const auto cols = t.numeric_columns();

  // Same train rows, test rows scrambled in place.
  std::vector<Column> scrambled = t.columns();
  Rng rng(1);
  for (auto c : cols) {
    for (std::size_t i = s.test.size(); i > 1; --i) {
      const auto a = s.test[i - 1], b = s.test[rng.index(i)];
      std::swap(scrambled[c].values[a], scrambled[c].values[b]);
      std::swap(scrambled[c].missing[a], scrambled[c].missing[b]);
      scrambled[c].values[a] *= 1000.0;
    }
  }
  const DataTable other(t.schema(), scrambled);

  for (auto kind : {TransformKind::kRobust, TransformKind::kLogStandard,
                    TransformKind::kQuantile, TransformKind::kStandard}) {
    const auto a = fit_transform(kind, t, s.train, cols);
    const auto b = fit_transform(kind, other, s.train, cols);
    for (std::size_t j = 0; j < a.columns.size(); ++j) {
      ASSERT_EQ(a.columns[j].center, b.columns[j].center);
      ASSERT_EQ(a.columns[j].scale, b.columns[j].scale);
      ASSERT_EQ(a.columns[j].quantiles, b.columns[j].quantiles);
    }
  }
  const auto ia = fit_iterative_imputer(t, s.train);
  const auto ib = fit_iterative_imputer(other, s.train);
  ASSERT_EQ(ia.means, ib.means);
  for (std::size_t j = 0; j < ia.regressions.size(); ++j) {
    ASSERT_EQ(ia.regressions[j].coefficients, ib.regressions[j].coefficients);
    ASSERT_EQ(ia.regressions[j].intercept, ib.regressions[j].intercept);
  }
}

TEST(TransformTest, KindNames) {
  for (auto kind : {TransformKind::kRobust, TransformKind::kLogStandard,
                    TransformKind::kQuantile, TransformKind::kStandard}) {
    EXPECT_EQ(parse_transform_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_transform_kind("minmax"), ArgumentError);
}

TEST(QuantileTest, Type7) {
  const std::vector<double> v = {1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(sorted_quantile(v, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(v, 0.1), 1.4);
}

// --- SMOTE ---------------------------------------------------------------

DataTable imbalanced(std::size_t majority, std::size_t minority, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> a, b, f;
  Labels y;
  for (std::size_t i = 0; i < majority + minority; ++i) {
    const bool pos = i >= majority;
    a.push_back(rng.normal() + (pos ? 3.0 : 0.0));
    b.push_back(rng.uniform() * 10.0);
    f.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
    y.push_back(pos ? 1 : 0);
  }
  return make_table({a, b}, y, {f});
}

TEST(SmoteTest, CountArithmetic) {
  const auto t = imbalanced(100, 5, 1);
  const auto rows = all_rows(t);
  const auto r = smote(t, rows, 3, 0.5, 1);
  EXPECT_EQ(r.synthetic.size(), 45u);
  EXPECT_EQ(r.table.row_count(), 150u);
  const auto y = r.table.labels();
  EXPECT_EQ(std::count(y.begin(), y.end(), 1), 50);
}

TEST(SmoteTest, RatioAlreadyMetIsNoOp) {
  const auto t = imbalanced(100, 5, 1);
  const auto rows = all_rows(t);
  const auto r = smote(t, rows, 3, 0.05, 1);
  EXPECT_TRUE(r.synthetic.empty());
  EXPECT_TRUE(r.table == t);
}

TEST(SmoteTest, SegmentBetweenTwoPoints) {
  const auto t = make_table({{0, 1, 5, 6, 7, 8}, {0, 1, 5, 6, 7, 8}}, {1, 1, 0, 0, 0, 0});
  const auto rows = all_rows(t);
  const auto r = smote(t, rows, 1, 1.0, 3);
  ASSERT_EQ(r.synthetic.size(), 2u);
  for (std::size_t i = 6; i < r.table.row_count(); ++i) {
    const double x = r.table.values(0)[i];
    EXPECT_EQ(x, r.table.values(1)[i]);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
}

// Every synthetic row is p + lambda (q - p) for some pair of real minority
// rows, found by brute force without the recorded provenance.
TEST(SmoteTest, SyntheticRowsAreConvexCombinations) {
  const auto t = imbalanced(300, 12, 5);
  const auto rows = all_rows(t);
  const auto r = smote(t, rows, 4, 1.0, 9);
  ASSERT_EQ(r.synthetic.size(), 288u);
  const auto y = t.labels();
  std::vector<std::size_t> minority;
  for (std::size_t i = 0; i < y.size(); ++i) if (y[i]) minority.push_back(i);

  auto lambda_for = [&](std::size_t p, std::size_t q, std::size_t s) -> double {
    double lambda = -1.0;
    for (std::size_t c = 0; c < 2; ++c) {
      const double pv = t.values(c)[p], qv = t.values(c)[q], sv = r.table.values(c)[s];
      if (pv == qv) {
        if (sv != pv) return -1.0;
        continue;
      }
      const double l = (sv - pv) / (qv - pv);
      if (l < -1e-12 || l > 1 + 1e-12) return -1.0;
      if (lambda >= 0 && std::abs(l - lambda) > 1e-9) return -1.0;
      lambda = l;
    }
    return lambda < 0 ? 0.0 : lambda;
  };

  for (std::size_t s = r.original_rows; s < r.table.row_count(); ++s) {
    bool found = false;
    for (auto p : minority) {
      for (auto q : minority) {
        if (p == q || lambda_for(p, q, s) < 0) continue;
        // Flags come from the base row.
        if (r.table.values(2)[s] == t.values(2)[p]) found = true;
      }
      if (found) break;
    }
    ASSERT_TRUE(found) << "synthetic row " << s;
    EXPECT_EQ(r.table.labels()[s], 1);
  }
  // Original rows unchanged.
  for (std::size_t c = 0; c < t.column_count(); ++c) {
    for (std::size_t i = 0; i < t.row_count(); ++i) {
      ASSERT_EQ(r.table.values(c)[i], t.values(c)[i]);
    }
  }
}

TEST(SmoteTest, DeterministicAndErrors) {
  const auto t = imbalanced(50, 6, 2);
  const auto rows = all_rows(t);
  EXPECT_TRUE(smote(t, rows, 2, 1.0, 4).table == smote(t, rows, 2, 1.0, 4).table);
  EXPECT_THROW(smote(t, rows, 6, 1.0, 4), DataError);
  EXPECT_THROW(smote(t, rows, 0, 1.0, 4), ArgumentError);
}

// --- PCA -----------------------------------------------------------------

TEST(PcaTest, RankOneData) {
  Rng rng(1);
  std::vector<double> a, b, c;
  for (int i = 0; i < 200; ++i) {
    const double s = rng.normal();
    a.push_back(s);
    b.push_back(2 * s);
    c.push_back(-3 * s + 1);
  }
  const auto t = make_table({a, b, c}, Labels(200, 0));
  const auto rows = all_rows(t);
  const auto cols = t.numeric_columns();
  const auto p = fit_pca(t, rows, 0.99, cols);
  EXPECT_EQ(p.n_components, 1u);
  EXPECT_GE(p.explained_variance_ratio[0], 0.99);
}

TEST(PcaTest, IsotropicNeedsAllComponents) {
  Rng rng(2);
  std::vector<std::vector<double>> cols(5);
  for (int i = 0; i < 5000; ++i) for (auto& c : cols) c.push_back(rng.normal());
  const auto t = make_table(cols, Labels(5000, 0));
  const auto rows = all_rows(t);
  const auto idx = t.numeric_columns();
  const auto p = fit_pca(t, rows, 0.99, idx);
  EXPECT_EQ(p.n_components, 5u);
}

TEST(PcaTest, SpectralProperties) {
  const auto t = generate_synthetic({.n_rows = 2000, .positive_rate = 0.05, .seed = 3,
                                     .missing_rate = 0.0});
  const auto rows = all_rows(t);
  const auto cols = t.numeric_columns();
  const auto p = fit_pca(t, rows, 0.99, cols);
  const Eigen::MatrixXd gram = p.loadings * p.loadings.transpose();
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(),
            1e-8);
  double total = 0, kept = 0;
  for (std::size_t i = 0; i < p.explained_variance_ratio.size(); ++i) {
    if (i > 0) {
      EXPECT_LE(p.explained_variance_ratio[i], p.explained_variance_ratio[i - 1]);
    }
    total += p.explained_variance_ratio[i];
    if (i < p.n_components) kept += p.explained_variance_ratio[i];
  }
  EXPECT_LE(total, 1.0 + 1e-12);
  EXPECT_GE(kept, 0.99);
  double imp = 0;
  for (double v : p.feature_importance) {
    EXPECT_GE(v, 0.0);
    imp += v;
  }
  EXPECT_NEAR(imp, 1.0, 1e-12);
}

TEST(PcaTest, Errors) {
  const auto t = make_table({{1.0}, {2.0}}, {0});
  const auto rows = all_rows(t);
  const auto cols = t.numeric_columns();
  EXPECT_THROW(fit_pca(t, rows, 0.99, cols), DataError);
}

}  // namespace
}  // namespace backorder
