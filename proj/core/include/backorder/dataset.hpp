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

#ifndef BACKORDER_DATASET_HPP_
#define BACKORDER_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace backorder {

using FeatureMatrix = Eigen::MatrixXd;
using Labels = std::vector<std::uint8_t>;
using RowIndices = std::vector<std::size_t>;

enum class ColumnKind { kNumeric, kBinary, kTarget };

std::string_view to_string(ColumnKind kind);

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::string unit;
  // Raw value that encodes "missing" in the source file (numeric only).
  std::optional<double> missing_sentinel;
};

// The inventory schema: 15 numeric drivers, 6 yes/no flags and the
// wentOnBackorder target. Column order is the canonical output order.
const std::vector<ColumnSchema>& inventory_schema();

// Throws SchemaError unless names are unique and exactly one column is the
// target.
void validate_schema(std::span<const ColumnSchema> schema);

struct Column {
  std::vector<double> values;          // NaN where missing
  std::vector<std::uint8_t> missing;   // 1 where missing

  bool operator==(const Column& other) const;
};

// Columnar table. Immutable once constructed; every transform produces a new
// table.
class DataTable {
 public:
  DataTable() = default;

  // Validates the schema and the per-column invariants: equal lengths,
  // target in {0,1} without missing cells, binary columns in {0,1}.
  DataTable(std::vector<ColumnSchema> schema, std::vector<Column> columns);

  const std::vector<ColumnSchema>& schema() const { return schema_; }
  std::size_t row_count() const { return row_count_; }
  std::size_t column_count() const { return columns_.size(); }

  const Column& column(std::size_t index) const { return columns_.at(index); }
  const std::vector<Column>& columns() const { return columns_; }
  std::span<const double> values(std::size_t index) const {
    return columns_.at(index).values;
  }
  bool is_missing(std::size_t col, std::size_t row) const {
    return columns_[col].missing[row] != 0;
  }

  std::optional<std::size_t> find_column(std::string_view name) const;
  // Throws SchemaError when absent.
  std::size_t column_index(std::string_view name) const;
  std::size_t target_index() const { return target_; }

  // Every non-target column, in schema order.
  std::vector<std::size_t> feature_columns() const;
  std::vector<std::size_t> numeric_columns() const;
  std::vector<std::string> column_names(std::span<const std::size_t> cols) const;

  Labels labels() const;
  Labels labels(std::span<const std::size_t> rows) const;
  std::size_t missing_count() const;

  DataTable select_rows(std::span<const std::size_t> rows) const;

  bool operator==(const DataTable& other) const;

 private:
  std::vector<ColumnSchema> schema_;
  std::vector<Column> columns_;
  std::size_t row_count_ = 0;
  std::size_t target_ = 0;
};

struct LoadReport {
  std::size_t rows_read = 0;
  // Rows without a target value are not loaded.
  std::size_t rows_dropped_missing_target = 0;
  std::size_t sentinel_cells = 0;
  bool sku_dropped = false;
};

// Reads a comma-separated file whose header names the schema columns in any
// order. An optional `sku` column is discarded. Yes/No cells are encoded
// 1/0; blank cells and per-column sentinels become missing.
DataTable load_csv(const std::filesystem::path& path,
                   std::span<const ColumnSchema> schema,
                   LoadReport* report = nullptr);
DataTable read_csv(std::istream& in, std::span<const ColumnSchema> schema,
                   LoadReport* report = nullptr);

// Writes in schema order. Binary and target columns are written as Yes/No,
// numbers in shortest round-trip form, missing cells as empty fields.
void write_csv(const DataTable& table, std::ostream& out);
void write_csv(const DataTable& table, const std::filesystem::path& path);

struct SplitIndices {
  RowIndices train;
  RowIndices test;
  std::uint64_t seed = 0;
};

// Random train/test partition with `fraction` of the rows in train. Both
// index lists are sorted ascending.
SplitIndices split(const DataTable& table, double fraction, std::uint64_t seed,
                   bool stratify);

struct SyntheticOptions {
  std::size_t n_rows = 20000;
  double positive_rate = 0.01;
  std::size_t n_informative = 6;
  std::uint64_t seed = 0;
  // Class shift of informative columns, in log-scale standard deviations.
  double signal = 1.0;
  // Fraction of leadTime / perf cells blanked out.
  double missing_rate = 0.03;
};

// Columns used as informative drivers, in the order they are assigned.
const std::vector<std::string>& synthetic_informative_order();

// Desk-scale stand-in for the inventory dataset: the full inventory schema
// with class-conditional lognormal drivers.
DataTable generate_synthetic(const SyntheticOptions& options);
DataTable generate_synthetic(std::size_t n_rows, double positive_rate,
                             std::size_t n_informative, std::uint64_t seed);

// Dense (rows x cols) copy of the selected cells. Throws DataError when a
// selected cell is missing.
FeatureMatrix to_matrix(const DataTable& table, std::span<const std::size_t> rows,
                        std::span<const std::size_t> cols);

RowIndices all_rows(const DataTable& table);

}  // namespace backorder

#endif  // BACKORDER_DATASET_HPP_
