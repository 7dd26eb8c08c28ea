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

#ifndef BACKORDER_STATS_HPP_
#define BACKORDER_STATS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "backorder/dataset.hpp"

namespace backorder {

enum class TestMethod { kMannWhitneyU, kChiSquare };

std::string_view to_string(TestMethod method);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  // Sample sizes for Mann-Whitney; total count and degrees of freedom for
  // chi-square.
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  TestMethod method = TestMethod::kMannWhitneyU;
  bool exact = false;
};

// p-values below this are reported as 0.
inline constexpr double kPValueFloor = 1e-300;

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> midranks(std::span<const double> values);

enum class MannWhitneyMode { kAuto, kExact, kNormal };

// Two-sided Mann-Whitney U test. The statistic is U for `x`:
// R_x - n_x (n_x + 1) / 2 over midranks of the pooled sample.
// kAuto enumerates the permutation distribution when n_x * n_y <= 64 and uses
// the tie- and continuity-corrected normal approximation otherwise.
TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          MannWhitneyMode mode = MannWhitneyMode::kAuto);

// 2x2 contingency counts: counts[a][b].
struct ContingencyTable {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};
};

ContingencyTable contingency(std::span<const std::uint8_t> a,
                             std::span<const std::uint8_t> b);

// Pearson chi-square without Yates correction, one degree of freedom.
TestResult chi_square(const ContingencyTable& table);
TestResult chi_square(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

// Upper tail of the chi-square distribution with one degree of freedom.
double chi_square_sf_df1(double statistic);

struct CorrelationMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
  // Columns that were constant on their observed cells.
  std::vector<bool> degenerate;
};

// Spearman rank correlation between every pair of columns, excluding missing
// cells pairwise.
CorrelationMatrix spearman_matrix(const DataTable& table,
                                  std::span<const std::size_t> columns,
                                  std::size_t threads = 1);

struct ChiSquareMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd statistic;
  Eigen::MatrixXd p_value;  // NaN where a margin was empty
};

// Pairwise chi-square over yes/no columns (and the target, if listed).
ChiSquareMatrix chi_square_matrix(const DataTable& table,
                                  std::span<const std::size_t> columns,
                                  std::span<const std::size_t> rows);

struct ScreeningRow {
  std::string attribute;
  TestResult result;
};

// Screens every feature against the target: Mann-Whitney U for numeric
// columns (x = backorder rows, y = the rest), chi-square for yes/no flags.
std::vector<ScreeningRow> screen_attributes(const DataTable& table,
                                            std::span<const std::size_t> rows);

}  // namespace backorder

#endif  // BACKORDER_STATS_HPP_
