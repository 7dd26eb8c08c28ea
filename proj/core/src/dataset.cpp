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

#include "backorder/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "backorder/error.hpp"
#include "backorder/random.hpp"

namespace backorder {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::string(trim(field)));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::string(trim(field)));
  return fields;
}

std::optional<double> parse_number(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), ::tolower);
    if (lowered == "nan") return kNaN;
    return std::nullopt;
  }
  return value;
}

std::optional<double> parse_yes_no(std::string_view text) {
  std::string lowered(text);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), ::tolower);
  if (lowered == "yes" || lowered == "y" || lowered == "true") return 1.0;
  if (lowered == "no" || lowered == "n" || lowered == "false") return 0.0;
  if (const auto number = parse_number(text)) {
    if (*number == 1.0) return 1.0;
    if (*number == 0.0) return 0.0;
  }
  return std::nullopt;
}

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kNumeric:
      return "numeric";
    case ColumnKind::kBinary:
      return "categorical-yes-no";
    case ColumnKind::kTarget:
      return "target";
  }
  return "unknown";
}

const std::vector<ColumnSchema>& inventory_schema() {
  static const std::vector<ColumnSchema> schema = [] {
    using K = ColumnKind;
    std::vector<ColumnSchema> s = {
        {"nationalInv", K::kNumeric, "unit", std::nullopt},
        {"leadTime", K::kNumeric, "weeks", std::nullopt},
        {"inTransitQty", K::kNumeric, "unit", std::nullopt},
        {"forecast3Month", K::kNumeric, "unit", std::nullopt},
        {"forecast6Month", K::kNumeric, "unit", std::nullopt},
        {"forecast9Month", K::kNumeric, "unit", std::nullopt},
        {"sales1Month", K::kNumeric, "unit", std::nullopt},
        {"sales3Month", K::kNumeric, "unit", std::nullopt},
        {"sales6Month", K::kNumeric, "unit", std::nullopt},
        {"sales9Month", K::kNumeric, "unit", std::nullopt},
        {"minBank", K::kNumeric, "unit", std::nullopt},
        {"potentialIssue", K::kBinary, "flag", std::nullopt},
        {"piecesPastDue", K::kNumeric, "unit", std::nullopt},
        {"perf6MonthAvg", K::kNumeric, "ratio", -99.0},
        {"perf12MonthAvg", K::kNumeric, "ratio", -99.0},
        {"localBoQty", K::kNumeric, "unit", std::nullopt},
        {"deckRisk", K::kBinary, "flag", std::nullopt},
        {"oeConstraint", K::kBinary, "flag", std::nullopt},
        {"ppapRisk", K::kBinary, "flag", std::nullopt},
        {"stopAutoBuy", K::kBinary, "flag", std::nullopt},
        {"revStop", K::kBinary, "flag", std::nullopt},
        {"wentOnBackorder", K::kTarget, "flag", std::nullopt},
    };
    return s;
  }();
  return schema;
}

void validate_schema(std::span<const ColumnSchema> schema) {
  std::unordered_set<std::string> names;
  std::size_t targets = 0;
  for (const auto& col : schema) {
    if (col.name.empty()) throw SchemaError("column with empty name");
    if (!names.insert(col.name).second) {
      throw SchemaError("duplicate column name '" + col.name + "'");
    }
    if (col.kind == ColumnKind::kTarget) ++targets;
  }
  if (targets != 1) {
    throw SchemaError("schema must contain exactly one target column, found " +
                      std::to_string(targets));
  }
}

bool Column::operator==(const Column& other) const {
  if (missing != other.missing || values.size() != other.values.size()) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (missing[i]) continue;
    if (values[i] != other.values[i]) return false;
  }
  return true;
}

DataTable::DataTable(std::vector<ColumnSchema> schema, std::vector<Column> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  validate_schema(schema_);
  if (schema_.size() != columns_.size()) {
    throw SchemaError("schema has " + std::to_string(schema_.size()) +
                      " columns but " + std::to_string(columns_.size()) +
                      " were supplied");
  }
  row_count_ = columns_.empty() ? 0 : columns_.front().values.size();
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    auto& col = columns_[c];
    const auto& spec = schema_[c];
    if (col.missing.empty() && !col.values.empty()) {
      col.missing.assign(col.values.size(), 0);
    }
    if (col.values.size() != row_count_ || col.missing.size() != row_count_) {
      throw SchemaError("column '" + spec.name + "' has inconsistent length");
    }
    for (std::size_t r = 0; r < row_count_; ++r) {
      if (col.missing[r]) {
        if (spec.kind == ColumnKind::kTarget) {
          throw DataError("target column '" + spec.name + "' has a missing cell at row " +
                          std::to_string(r));
        }
        col.values[r] = kNaN;
        continue;
      }
      const double v = col.values[r];
      if (std::isnan(v)) {
        col.missing[r] = 1;
        if (spec.kind == ColumnKind::kTarget) {
          throw DataError("target column '" + spec.name + "' has a missing cell at row " +
                          std::to_string(r));
        }
        continue;
      }
      if (spec.kind != ColumnKind::kNumeric && v != 0.0 && v != 1.0) {
        throw DataError("column '" + spec.name + "' must contain only 0/1, found " +
                        format_number(v) + " at row " + std::to_string(r));
      }
    }
    if (spec.kind == ColumnKind::kTarget) target_ = c;
  }
}

std::optional<std::size_t> DataTable::find_column(std::string_view name) const {
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].name == name) return c;
  }
  return std::nullopt;
}

std::size_t DataTable::column_index(std::string_view name) const {
  if (auto idx = find_column(name)) return *idx;
  throw SchemaError("unknown column '" + std::string(name) + "'");
}

std::vector<std::size_t> DataTable::feature_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].kind != ColumnKind::kTarget) out.push_back(c);
  }
  return out;
}

std::vector<std::size_t> DataTable::numeric_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].kind == ColumnKind::kNumeric) out.push_back(c);
  }
  return out;
}

std::vector<std::string> DataTable::column_names(
    std::span<const std::size_t> cols) const {
  std::vector<std::string> names;
  names.reserve(cols.size());
  for (auto c : cols) names.push_back(schema_.at(c).name);
  return names;
}

Labels DataTable::labels() const {
  Labels out(row_count_);
  const auto& t = columns_[target_].values;
  for (std::size_t r = 0; r < row_count_; ++r) out[r] = t[r] != 0.0 ? 1 : 0;
  return out;
}

Labels DataTable::labels(std::span<const std::size_t> rows) const {
  Labels out(rows.size());
  const auto& t = columns_[target_].values;
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = t.at(rows[i]) != 0.0 ? 1 : 0;
  return out;
}

std::size_t DataTable::missing_count() const {
  std::size_t n = 0;
  for (const auto& col : columns_) {
    n += static_cast<std::size_t>(std::count(col.missing.begin(), col.missing.end(), 1));
  }
  return n;
}

DataTable DataTable::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> cols(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    cols[c].values.reserve(rows.size());
    cols[c].missing.reserve(rows.size());
    for (auto r : rows) {
      if (r >= row_count_) throw ArgumentError("row index out of range");
      cols[c].values.push_back(columns_[c].values[r]);
      cols[c].missing.push_back(columns_[c].missing[r]);
    }
  }
  return DataTable(schema_, std::move(cols));
}

bool DataTable::operator==(const DataTable& other) const {
  if (row_count_ != other.row_count_ || schema_.size() != other.schema_.size()) {
    return false;
  }
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    if (schema_[c].name != other.schema_[c].name ||
        schema_[c].kind != other.schema_[c].kind) {
      return false;
    }
  }
  return columns_ == other.columns_;
}

DataTable read_csv(std::istream& in, std::span<const ColumnSchema> schema,
                   LoadReport* report) {
  validate_schema(schema);
  LoadReport local;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header row");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB &&
      static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }

  const auto header = split_record(line);
  std::unordered_map<std::string, std::size_t> schema_pos;
  for (std::size_t c = 0; c < schema.size(); ++c) schema_pos[schema[c].name] = c;

  // field index -> schema index (or npos for the dropped sku column)
  constexpr std::size_t kDrop = static_cast<std::size_t>(-1);
  std::vector<std::size_t> field_to_col(header.size(), kDrop);
  std::vector<bool> seen(schema.size(), false);
  for (std::size_t f = 0; f < header.size(); ++f) {
    if (header[f] == "sku") {
      local.sku_dropped = true;
      continue;
    }
    auto it = schema_pos.find(header[f]);
    if (it == schema_pos.end()) {
      throw SchemaError("unknown column '" + header[f] + "' in header");
    }
    if (seen[it->second]) throw SchemaError("duplicate column '" + header[f] + "'");
    seen[it->second] = true;
    field_to_col[f] = it->second;
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (!seen[c]) throw SchemaError("column '" + schema[c].name + "' missing from header");
  }

  std::size_t target = 0;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (schema[c].kind == ColumnKind::kTarget) target = c;
  }
  std::size_t target_field = 0;
  for (std::size_t f = 0; f < field_to_col.size(); ++f) {
    if (field_to_col[f] == target) target_field = f;
  }

  std::vector<Column> cols(schema.size());
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_record(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    ++local.rows_read;
    if (fields[target_field].empty()) {
      ++local.rows_dropped_missing_target;
      continue;
    }
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const std::size_t c = field_to_col[f];
      if (c == kDrop) continue;
      const auto& spec = schema[c];
      const std::string& cell = fields[f];
      double value = kNaN;
      std::uint8_t missing = 0;
      if (spec.kind == ColumnKind::kNumeric) {
        if (cell.empty()) {
          missing = 1;
        } else {
          auto parsed = parse_number(cell);
          if (!parsed) {
            throw ParseError("non-numeric value '" + cell + "'", line_no, spec.name);
          }
          value = *parsed;
          if (std::isnan(value)) {
            missing = 1;
          } else if (spec.missing_sentinel && value == *spec.missing_sentinel) {
            missing = 1;
            value = kNaN;
            ++local.sentinel_cells;
          }
        }
      } else {
        auto parsed = parse_yes_no(cell);
        if (!parsed) {
          throw ParseError("unparseable categorical value '" + cell + "'", line_no,
                           spec.name);
        }
        value = *parsed;
      }
      cols[c].values.push_back(value);
      cols[c].missing.push_back(missing);
    }
  }
  if (report) *report = local;
  return DataTable(std::vector<ColumnSchema>(schema.begin(), schema.end()), std::move(cols));
}

DataTable load_csv(const std::filesystem::path& path,
                   std::span<const ColumnSchema> schema, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path.string() + "'");
  return read_csv(in, schema, report);
}

void write_csv(const DataTable& table, std::ostream& out) {
  const auto& schema = table.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c) out << ',';
    out << schema[c].name;
  }
  out << '\n';
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (c) out << ',';
      if (table.is_missing(c, r)) continue;
      const double v = table.values(c)[r];
      if (schema[c].kind == ColumnKind::kNumeric) {
        out << format_number(v);
      } else {
        out << (v != 0.0 ? "Yes" : "No");
      }
    }
    out << '\n';
  }
}

void write_csv(const DataTable& table, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write '" + path.string() + "'");
  write_csv(table, out);
}

SplitIndices split(const DataTable& table, double fraction, std::uint64_t seed,
                   bool stratify) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ArgumentError("split fraction must lie in (0, 1)");
  }
  const std::size_t n = table.row_count();
  if (n < 2) throw ArgumentError("split needs at least 2 rows");

  Rng rng(seed);
  SplitIndices out;
  out.seed = seed;

  std::vector<RowIndices> groups;
  if (stratify) {
    const auto y = table.labels();
    groups.resize(2);
    for (std::size_t r = 0; r < n; ++r) groups[y[r]].push_back(r);
    if (groups[0].empty() || groups[1].empty()) {
      throw DataError("stratified split needs at least one row of each class");
    }
  } else {
    groups.push_back(all_rows(table));
  }

  std::vector<std::size_t> n_train(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    n_train[g] = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(groups[g].size())));
  }
  // Keep both partitions non-empty.
  std::size_t total_train = 0;
  for (auto k : n_train) total_train += k;
  if (total_train == 0 || total_train == n) {
    std::size_t largest = 0;
    for (std::size_t g = 1; g < groups.size(); ++g) {
      if (groups[g].size() > groups[largest].size()) largest = g;
    }
    if (total_train == 0) ++n_train[largest];
    else --n_train[largest];
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& idx = groups[g];
    rng.shuffle(std::span<std::size_t>(idx));
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + n_train[g]);
    out.test.insert(out.test.end(), idx.begin() + n_train[g], idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

const std::vector<std::string>& synthetic_informative_order() {
  static const std::vector<std::string> order = {
      "nationalInv",    "sales1Month",   "forecast3Month", "sales9Month",
      "leadTime",       "perf6MonthAvg", "inTransitQty",   "minBank",
      "sales3Month",    "forecast6Month", "sales6Month",   "forecast9Month",
      "piecesPastDue",  "perf12MonthAvg", "localBoQty"};
  return order;
}

namespace {

enum class Shape { kCount, kWeeks, kRatio };

struct NumericProfile {
  const char* name;
  Shape shape;
  double location;  // log-scale (or logit-scale for ratios) mean
  double scale;     // log-scale standard deviation
  double direction; // sign of the class shift when informative
};

// Heavy right skew with many zeros, loosely following the inventory summary
// statistics (e.g. nationalInv median 15, sales medians 0).
constexpr NumericProfile kProfiles[] = {
    {"nationalInv", Shape::kCount, 2.8, 1.8, -1.0},
    {"leadTime", Shape::kWeeks, 2.0, 0.45, 1.0},
    {"inTransitQty", Shape::kCount, 0.4, 2.0, -1.0},
    {"forecast3Month", Shape::kCount, 0.8, 2.2, 1.0},
    {"forecast6Month", Shape::kCount, 1.4, 2.2, 1.0},
    {"forecast9Month", Shape::kCount, 1.8, 2.2, 1.0},
    {"sales1Month", Shape::kCount, 0.5, 2.0, 1.0},
    {"sales3Month", Shape::kCount, 1.2, 2.1, 1.0},
    {"sales6Month", Shape::kCount, 1.7, 2.1, 1.0},
    {"sales9Month", Shape::kCount, 2.0, 2.1, 1.0},
    {"minBank", Shape::kCount, 0.3, 1.8, -1.0},
    {"piecesPastDue", Shape::kCount, -2.0, 1.5, 1.0},
    {"perf6MonthAvg", Shape::kRatio, 1.8, 1.2, -1.0},
    {"perf12MonthAvg", Shape::kRatio, 1.8, 1.2, -1.0},
    {"localBoQty", Shape::kCount, -2.5, 1.5, 1.0},
};

struct FlagProfile {
  const char* name;
  double rate;
};

constexpr FlagProfile kFlags[] = {
    {"potentialIssue", 0.005}, {"deckRisk", 0.22}, {"oeConstraint", 0.002},
    {"ppapRisk", 0.12},        {"stopAutoBuy", 0.96}, {"revStop", 0.001},
};

}  // namespace

DataTable generate_synthetic(const SyntheticOptions& options) {
  if (options.n_rows < 10) throw ArgumentError("synthetic data needs n_rows >= 10");
  if (!(options.positive_rate > 0.0 && options.positive_rate < 0.5)) {
    throw ArgumentError("positive_rate must lie in (0, 0.5)");
  }
  if (options.n_informative > 15) {
    throw ArgumentError("n_informative must be at most 15");
  }
  if (!(options.missing_rate >= 0.0 && options.missing_rate < 1.0)) {
    throw ArgumentError("missing_rate must lie in [0, 1)");
  }

  const auto& schema = inventory_schema();
  const std::size_t n = options.n_rows;
  std::vector<Column> cols(schema.size());
  for (auto& c : cols) {
    c.values.assign(n, 0.0);
    c.missing.assign(n, 0);
  }
  auto col_of = [&](std::string_view name) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (schema[c].name == name) return c;
    }
    throw SchemaError("synthetic generator: unknown column");
  };

  // Independent streams per concern keep columns stable when options change.
  Rng label_rng(derive_seed(options.seed, 0));
  const std::size_t target = col_of("wentOnBackorder");
  for (std::size_t r = 0; r < n; ++r) {
    cols[target].values[r] = label_rng.bernoulli(options.positive_rate) ? 1.0 : 0.0;
  }
  const auto& y = cols[target].values;

  const auto& order = synthetic_informative_order();
  auto is_informative = [&](std::string_view name) {
    for (std::size_t i = 0; i < options.n_informative; ++i) {
      if (order[i] == name) return true;
    }
    return false;
  };

  std::uint64_t stream = 1;
  for (const auto& p : kProfiles) {
    const std::size_t c = col_of(p.name);
    const double shift = is_informative(p.name) ? p.direction * options.signal : 0.0;
    Rng rng(derive_seed(options.seed, stream++));
    for (std::size_t r = 0; r < n; ++r) {
      const double z = rng.normal() + shift * y[r];
      const double latent = p.location + p.scale * z;
      double v = 0.0;
      switch (p.shape) {
        case Shape::kCount:
          v = std::max(0.0, std::floor(std::exp(latent) - 1.0));
          break;
        case Shape::kWeeks:
          v = std::clamp(std::round(std::exp(latent)), 0.0, 52.0);
          break;
        case Shape::kRatio:
          v = std::round(100.0 / (1.0 + std::exp(-latent))) / 100.0;
          break;
      }
      cols[c].values[r] = v;
    }
  }

  for (const auto& f : kFlags) {
    const std::size_t c = col_of(f.name);
    Rng rng(derive_seed(options.seed, stream++));
    for (std::size_t r = 0; r < n; ++r) {
      cols[c].values[r] = rng.bernoulli(f.rate) ? 1.0 : 0.0;
    }
  }

  for (const char* name : {"leadTime", "perf6MonthAvg", "perf12MonthAvg"}) {
    const std::size_t c = col_of(name);
    Rng rng(derive_seed(options.seed, stream++));
    for (std::size_t r = 0; r < n; ++r) {
      if (rng.bernoulli(options.missing_rate)) {
        cols[c].values[r] = kNaN;
        cols[c].missing[r] = 1;
      }
    }
  }

  return DataTable(schema, std::move(cols));
}

DataTable generate_synthetic(std::size_t n_rows, double positive_rate,
                             std::size_t n_informative, std::uint64_t seed) {
  SyntheticOptions options;
  options.n_rows = n_rows;
  options.positive_rate = positive_rate;
  options.n_informative = n_informative;
  options.seed = seed;
  return generate_synthetic(options);
}

FeatureMatrix to_matrix(const DataTable& table, std::span<const std::size_t> rows,
                        std::span<const std::size_t> cols) {
  FeatureMatrix m(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto& col = table.column(cols[j]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t r = rows[i];
      if (col.missing.at(r)) {
        throw DataError("missing value in column '" + table.schema()[cols[j]].name +
                        "' at row " + std::to_string(r) + "; impute first");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col.values[r];
    }
  }
  return m;
}

RowIndices all_rows(const DataTable& table) {
  RowIndices rows(table.row_count());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
  return rows;
}

}  // namespace backorder
