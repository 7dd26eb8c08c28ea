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

#ifndef BACKORDER_TESTS_SUPPORT_HPP_
#define BACKORDER_TESTS_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "backorder/dataset.hpp"

namespace backorder::testing {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Small table with numeric columns x0..x{k-1}, optional flag columns and a
// target. NaN cells become missing.
inline DataTable make_table(const std::vector<std::vector<double>>& numeric,
                            const std::vector<std::uint8_t>& target,
                            const std::vector<std::vector<double>>& flags = {}) {
  std::vector<ColumnSchema> schema;
  std::vector<Column> cols;
  auto add = [&](const std::string& name, ColumnKind kind, const std::vector<double>& v) {
    schema.push_back(ColumnSchema{name, kind, "", std::nullopt});
    Column c;
    c.values = v;
    for (double x : v) c.missing.push_back(std::isnan(x) ? 1 : 0);
    cols.push_back(std::move(c));
  };
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    add("x" + std::to_string(i), ColumnKind::kNumeric, numeric[i]);
  }
  for (std::size_t i = 0; i < flags.size(); ++i) {
    add("f" + std::to_string(i), ColumnKind::kBinary, flags[i]);
  }
  add("y", ColumnKind::kTarget, std::vector<double>(target.begin(), target.end()));
  return DataTable(std::move(schema), std::move(cols));
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("backorder_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace backorder::testing

#endif  // BACKORDER_TESTS_SUPPORT_HPP_
