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

#include "backorder/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "backorder/error.hpp"
#include "backorder/parallel.hpp"

namespace backorder {
namespace {

double floor_p(double p) {
  if (p < kPValueFloor) return 0.0;
  return std::min(1.0, p);
}

// Exact two-sided permutation p-value of U by enumerating every assignment of
// n1 pooled midranks to the first sample.
double exact_u_p_value(const std::vector<double>& ranks, std::size_t n1, double u_obs) {
  const std::size_t n = ranks.size();
  const double offset = static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
  std::uint64_t total = 0, lower = 0, upper = 0;
  constexpr double kEps = 1e-9;

  std::function<void(std::size_t, std::size_t, double)> visit =
      [&](std::size_t start, std::size_t remaining, double rank_sum) {
        if (remaining == 0) {
          const double u = rank_sum - offset;
          ++total;
          if (u <= u_obs + kEps) ++lower;
          if (u >= u_obs - kEps) ++upper;
          return;
        }
        for (std::size_t i = start; i + remaining <= n; ++i) {
          visit(i + 1, remaining - 1, rank_sum + ranks[i]);
        }
      };
  visit(0, n1, 0.0);
  const double p_lower = static_cast<double>(lower) / static_cast<double>(total);
  const double p_upper = static_cast<double>(upper) / static_cast<double>(total);
  return std::min(1.0, 2.0 * std::min(p_lower, p_upper));
}

double pearson(std::span<const double> a, std::span<const double> b, bool* degenerate) {
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    *degenerate = true;
    return 0.0;
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

std::string_view to_string(TestMethod method) {
  return method == TestMethod::kMannWhitneyU ? "mann-whitney-u" : "chi-square";
}

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank mean of (i+1)..j.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          MannWhitneyMode mode) {
  if (x.empty() || y.empty()) throw ArgumentError("Mann-Whitney U needs non-empty samples");
  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto ranks = midranks(pooled);

  double r1 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
  const double d1 = static_cast<double>(n1);
  const double d2 = static_cast<double>(n2);
  const double u = r1 - d1 * (d1 + 1.0) / 2.0;

  TestResult result;
  result.method = TestMethod::kMannWhitneyU;
  result.statistic = u;
  result.n1 = n1;
  result.n2 = n2;

  const bool exact = mode == MannWhitneyMode::kExact ||
                     (mode == MannWhitneyMode::kAuto && n1 * n2 <= 64);
  if (exact) {
    if (n1 + n2 > 30) throw ArgumentError("exact Mann-Whitney limited to 30 pooled values");
    result.exact = true;
    result.p_value = floor_p(exact_u_p_value(ranks, n1, u));
    return result;
  }

  // Tie correction: sum over tie groups of t^3 - t.
  std::vector<double> sorted(pooled);
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double n = d1 + d2;
  const double mean = d1 * d2 / 2.0;
  const double variance = d1 * d2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(variance > 0.0)) {
    result.p_value = 1.0;
    return result;
  }
  const double z = std::max(0.0, std::abs(u - mean) - 0.5) / std::sqrt(variance);
  result.p_value = floor_p(std::erfc(z / std::sqrt(2.0)));
  return result;
}

ContingencyTable contingency(std::span<const std::uint8_t> a,
                             std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw ArgumentError("chi-square columns differ in length");
  ContingencyTable t;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 1 || b[i] > 1) throw ArgumentError("chi-square columns must be 0/1");
    ++t.counts[a[i]][b[i]];
  }
  return t;
}

double chi_square_sf_df1(double statistic) {
  if (!(statistic > 0.0)) return 1.0;
  return std::erfc(std::sqrt(statistic / 2.0));
}

TestResult chi_square(const ContingencyTable& table) {
  const auto& c = table.counts;
  const double n00 = static_cast<double>(c[0][0]);
  const double n01 = static_cast<double>(c[0][1]);
  const double n10 = static_cast<double>(c[1][0]);
  const double n11 = static_cast<double>(c[1][1]);
  const double row0 = n00 + n01;
  const double row1 = n10 + n11;
  const double col0 = n00 + n10;
  const double col1 = n01 + n11;
  const double n = row0 + row1;
  if (row0 == 0.0) throw DataError("chi-square: first variable never takes value 0");
  if (row1 == 0.0) throw DataError("chi-square: first variable never takes value 1");
  if (col0 == 0.0) throw DataError("chi-square: second variable never takes value 0");
  if (col1 == 0.0) throw DataError("chi-square: second variable never takes value 1");

  // n (ad - bc)^2 / (row0 row1 col0 col1); margins multiplied pairwise so that
  // transposing the table gives the identical floating-point result.
  const double diff = n00 * n11 - n01 * n10;
  const double denom = (row0 * row1) * (col0 * col1);
  TestResult result;
  result.method = TestMethod::kChiSquare;
  result.statistic = n * diff * diff / denom;
  result.p_value = floor_p(chi_square_sf_df1(result.statistic));
  result.n1 = static_cast<std::size_t>(n);
  result.n2 = 1;
  result.exact = false;
  return result;
}

TestResult chi_square(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  return chi_square(contingency(a, b));
}

CorrelationMatrix spearman_matrix(const DataTable& table,
                                  std::span<const std::size_t> columns,
                                  std::size_t threads) {
  if (table.row_count() < 2) throw DataError("Spearman correlation needs at least 2 rows");
  const std::size_t m = columns.size();
  CorrelationMatrix out;
  out.labels = table.column_names(columns);
  out.values = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                         static_cast<Eigen::Index>(m));
  out.degenerate.assign(m, false);

  // Full-column ranks for columns without missing cells.
  std::vector<std::vector<double>> full_ranks(m);
  std::vector<bool> complete(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& col = table.column(columns[i]);
    complete[i] = std::find(col.missing.begin(), col.missing.end(), 1) == col.missing.end();
    if (complete[i]) full_ranks[i] = midranks(col.values);
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> rho(pairs.size(), 0.0);

  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    bool degenerate = false;  // reported per column below
    if (complete[i] && complete[j]) {
      rho[p] = pearson(full_ranks[i], full_ranks[j], &degenerate);
    } else {
      const auto& ci = table.column(columns[i]);
      const auto& cj = table.column(columns[j]);
      std::vector<double> a, b;
      for (std::size_t r = 0; r < table.row_count(); ++r) {
        if (ci.missing[r] || cj.missing[r]) continue;
        a.push_back(ci.values[r]);
        b.push_back(cj.values[r]);
      }
      if (a.size() < 2) {
        degenerate = true;
      } else {
        rho[p] = pearson(midranks(a), midranks(b), &degenerate);
      }
    }
  });

  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rho[p];
    out.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rho[p];
  }
  // Flag only the column that is constant, not its partner.
  for (std::size_t i = 0; i < m; ++i) {
    const auto& col = table.column(columns[i]);
    double first = 0.0;
    bool have = false, constant = true;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      if (col.missing[r]) continue;
      if (!have) {
        first = col.values[r];
        have = true;
      } else if (col.values[r] != first) {
        constant = false;
        break;
      }
    }
    out.degenerate[i] = constant;
  }
  return out;
}

ChiSquareMatrix chi_square_matrix(const DataTable& table,
                                  std::span<const std::size_t> columns,
                                  std::span<const std::size_t> rows) {
  const std::size_t m = columns.size();
  ChiSquareMatrix out;
  out.labels = table.column_names(columns);
  out.statistic = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                        static_cast<Eigen::Index>(m));
  out.p_value = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(m),
                                          static_cast<Eigen::Index>(m),
                                          std::numeric_limits<double>::quiet_NaN());
  std::vector<std::vector<std::uint8_t>> binary(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& spec = table.schema().at(columns[i]);
    if (spec.kind == ColumnKind::kNumeric) {
      throw ArgumentError("chi-square matrix: column '" + spec.name + "' is not yes/no");
    }
    for (auto r : rows) binary[i].push_back(table.values(columns[i])[r] != 0.0 ? 1 : 0);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      try {
        const auto res = chi_square(binary[i], binary[j]);
        out.statistic(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = res.statistic;
        out.p_value(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = res.p_value;
      } catch (const DataError&) {
        // Empty margin: left as NaN.
      }
    }
  }
  return out;
}

std::vector<ScreeningRow> screen_attributes(const DataTable& table,
                                            std::span<const std::size_t> rows) {
  const auto y = table.labels(rows);
  std::vector<ScreeningRow> out;
  for (const auto c : table.feature_columns()) {
    const auto& spec = table.schema()[c];
    const auto& col = table.column(c);
    ScreeningRow row;
    row.attribute = spec.name;
    if (spec.kind == ColumnKind::kNumeric) {
      std::vector<double> pos, neg;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = rows[i];
        if (col.missing[r]) continue;
        (y[i] ? pos : neg).push_back(col.values[r]);
      }
      if (pos.empty() || neg.empty()) {
        throw DataError("screening needs both classes with observed '" + spec.name + "'");
      }
      row.result = mann_whitney_u(pos, neg, MannWhitneyMode::kNormal);
    } else {
      std::vector<std::uint8_t> flag;
      flag.reserve(rows.size());
      for (auto r : rows) flag.push_back(col.values[r] != 0.0 ? 1 : 0);
      try {
        row.result = chi_square(flag, y);
      } catch (const DataError&) {
        // Flag constant on these rows: no evidence either way.
        row.result.method = TestMethod::kChiSquare;
        row.result.statistic = 0.0;
        row.result.p_value = 1.0;
        row.result.n1 = rows.size();
        row.result.n2 = 1;
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace backorder
