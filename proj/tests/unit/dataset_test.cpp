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
#include <sstream>
#include <string>
#include <vector>

#include "backorder/dataset.hpp"
#include "backorder/error.hpp"
#include "backorder/random.hpp"
#include "backorder/stats.hpp"
#include "support.hpp"

namespace backorder {
namespace {

using testing::kNaN;
using testing::make_table;

const std::string kHeader =
    "sku,nationalInv,leadTime,inTransitQty,forecast3Month,forecast6Month,forecast9Month,"
    "sales1Month,sales3Month,sales6Month,sales9Month,minBank,potentialIssue,piecesPastDue,"
    "perf6MonthAvg,perf12MonthAvg,localBoQty,deckRisk,oeConstraint,ppapRisk,stopAutoBuy,"
    "revStop,wentOnBackorder";

std::string row(const std::string& perf6, const std::string& deck, const std::string& target,
                const std::string& lead = "8") {
  return "1026827,0," + lead + ",0,0,0,0,0,0,0,0,0,No,0," + perf6 + ",0.2,0," + deck +
         ",No,No,Yes,No," + target;
}

DataTable parse(const std::string& text, LoadReport* report = nullptr) {
  std::istringstream in(text);
  return read_csv(in, inventory_schema(), report);
}

TEST(SchemaTest, InventorySchemaShape) {
  const auto& s = inventory_schema();
  ASSERT_EQ(s.size(), 22u);
  std::size_t numeric = 0, binary = 0, target = 0;
  for (const auto& c : s) {
    numeric += c.kind == ColumnKind::kNumeric;
    binary += c.kind == ColumnKind::kBinary;
    target += c.kind == ColumnKind::kTarget;
  }
  EXPECT_EQ(numeric, 15u);
  EXPECT_EQ(binary, 6u);
  EXPECT_EQ(target, 1u);
  EXPECT_NO_THROW(validate_schema(s));
}

TEST(SchemaTest, RejectsDuplicatesAndTargetCount) {
  std::vector<ColumnSchema> dup = {{"a", ColumnKind::kNumeric, "", {}},
                                   {"a", ColumnKind::kNumeric, "", {}},
                                   {"y", ColumnKind::kTarget, "", {}}};
  EXPECT_THROW(validate_schema(dup), SchemaError);
  std::vector<ColumnSchema> none = {{"a", ColumnKind::kNumeric, "", {}}};
  EXPECT_THROW(validate_schema(none), SchemaError);
}

TEST(CsvTest, SentinelBecomesMissing) {
  LoadReport report;
  const auto t = parse(kHeader + "\n" + row("-99.0", "No", "No") + "\n", &report);
  const auto c = t.column_index("perf6MonthAvg");
  EXPECT_TRUE(t.is_missing(c, 0));
  EXPECT_EQ(report.sentinel_cells, 1u);
  EXPECT_TRUE(report.sku_dropped);
  EXPECT_FALSE(t.find_column("sku").has_value());
}

TEST(CsvTest, SentinelOnlyInPerformanceColumns) {
  std::string line = row("0.5", "No", "No");
  line.replace(line.find(",0,8,"), 5, ",-99,8,");
  const auto t = parse(kHeader + "\n" + line + "\n");
  const auto c = t.column_index("nationalInv");
  EXPECT_FALSE(t.is_missing(c, 0));
  EXPECT_EQ(t.values(c)[0], -99.0);
}

TEST(CsvTest, YesNoEncoding) {
  const auto t = parse(kHeader + "\n" + row("0.5", "Yes", "Yes") + "\n" +
                       row("0.5", "No", "No") + "\n");
  const auto deck = t.column_index("deckRisk");
  EXPECT_EQ(t.values(deck)[0], 1.0);
  EXPECT_EQ(t.values(deck)[1], 0.0);
  EXPECT_EQ(t.labels(), (Labels{1, 0}));
}

TEST(CsvTest, EmptyBodyGivesZeroRows) {
  const auto t = parse(kHeader + "\n");
  EXPECT_EQ(t.row_count(), 0u);
  EXPECT_EQ(t.column_count(), 22u);
}

TEST(CsvTest, BlankNumericCellIsMissing) {
  const auto t = parse(kHeader + "\n" + row("0.5", "No", "No", "") + "\n");
  EXPECT_TRUE(t.is_missing(t.column_index("leadTime"), 0));
  EXPECT_EQ(t.missing_count(), 1u);
}

TEST(CsvTest, HeaderOrderDoesNotMatter) {
  const std::string text = "wentOnBackorder,nationalInv\nYes,3\nNo,4\n";
  std::vector<ColumnSchema> schema = {{"nationalInv", ColumnKind::kNumeric, "", {}},
                                      {"wentOnBackorder", ColumnKind::kTarget, "", {}}};
  std::istringstream in(text);
  const auto t = read_csv(in, schema);
  EXPECT_EQ(t.values(0)[1], 4.0);
  EXPECT_EQ(t.labels(), (Labels{1, 0}));
}

TEST(CsvTest, Errors) {
  EXPECT_THROW(parse(kHeader + ",extra\n"), SchemaError);
  EXPECT_THROW(parse("nationalInv,wentOnBackorder\n"), SchemaError);

  std::string bad = row("0.5", "No", "No");
  bad.replace(bad.find(",0,8,"), 5, ",abc,8,");
  try {
    parse(kHeader + "\n" + bad + "\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2);
    EXPECT_EQ(e.column(), "nationalInv");
  }
  EXPECT_THROW(parse(kHeader + "\n" + row("0.5", "Maybe", "No") + "\n"), ParseError);
}

TEST(CsvTest, MissingTargetRowsAreDropped) {
  LoadReport report;
  const auto t = parse(kHeader + "\n" + row("0.5", "No", "") + "\n" + row("0.5", "No", "Yes") +
                           "\n",
                       &report);
  EXPECT_EQ(t.row_count(), 1u);
  EXPECT_EQ(report.rows_read, 2u);
  EXPECT_EQ(report.rows_dropped_missing_target, 1u);
}

TEST(CsvTest, RoundTripIsExact) {
  SyntheticOptions opts;
  opts.n_rows = 500;
  opts.positive_rate = 0.1;
  opts.seed = 11;
  opts.missing_rate = 0.1;
  const auto t = generate_synthetic(opts);
  std::ostringstream out;
  write_csv(t, out);
  std::istringstream in(out.str());
  const auto back = read_csv(in, inventory_schema());
  EXPECT_TRUE(back == t);
  std::ostringstream again;
  write_csv(back, again);
  EXPECT_EQ(again.str(), out.str());
}

DataTable labelled(std::size_t n, std::size_t positives) {
  std::vector<double> x(n);
  Labels y(n, 0);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
  for (std::size_t i = 0; i < positives; ++i) y[i * (n / positives)] = 1;
  return make_table({x}, y);
}

TEST(SplitTest, TenRows) {
  const auto s = split(labelled(10, 5), 0.8, 1, false);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.test.size(), 2u);
}

TEST(SplitTest, StratifiedCounts) {
  const auto t = labelled(1000, 10);
  const auto s = split(t, 0.8, 4, true);
  const auto y = t.labels();
  std::size_t tr = 0, te = 0;
  for (auto r : s.train) tr += y[r];
  for (auto r : s.test) te += y[r];
  EXPECT_EQ(tr, 8u);
  EXPECT_EQ(te, 2u);
}

TEST(SplitTest, DeterministicAndErrors) {
  const auto t = labelled(50, 5);
  const auto a = split(t, 0.8, 9, true);
  const auto b = split(t, 0.8, 9, true);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_THROW(split(t, 0.0, 1, false), ArgumentError);
  EXPECT_THROW(split(t, 1.0, 1, false), ArgumentError);
  EXPECT_THROW(split(labelled(1, 1), 0.5, 1, false), ArgumentError);
}

// Property: disjoint, exhaustive, sorted, sized within a row, stratified
// proportions within 1/|partition| of the global rate.
TEST(SplitTest, PropertiesOverRandomTables) {
  Rng rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.index(300);
    Labels y(n);
    for (auto& v : y) v = rng.bernoulli(0.2) ? 1 : 0;
    y[0] = 1;
    y[1] = 0;
    const auto t = make_table({std::vector<double>(n, 1.0)}, y);
    const double fraction = rng.uniform(0.05, 0.95);
    const bool stratify = trial % 2 == 0;
    const auto s = split(t, fraction, rng.next_u64(), stratify);

    std::vector<int> seen(n, 0);
    for (auto r : s.train) ++seen[r];
    for (auto r : s.test) ++seen[r];
    for (int c : seen) ASSERT_EQ(c, 1);
    ASSERT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
    ASSERT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
    ASSERT_FALSE(s.train.empty());
    ASSERT_FALSE(s.test.empty());
    ASSERT_LE(std::abs(static_cast<double>(s.train.size()) - fraction * n), 1.0 + 1e-9);

    if (stratify) {
      double pos = 0;
      for (auto v : y) pos += v;
      const double global = pos / n;
      for (const auto* part : {&s.train, &s.test}) {
        double k = 0;
        for (auto r : *part) k += y[r];
        ASSERT_LE(std::abs(k / part->size() - global), 1.0 / part->size() + 1e-12);
      }
    }
  }
}

TEST(SyntheticTest, ShapeAndPositiveRate) {
  const auto t = generate_synthetic(20000, 0.01, 6, 0);
  EXPECT_EQ(t.row_count(), 20000u);
  EXPECT_EQ(t.schema().size(), inventory_schema().size());
  const auto y = t.labels();
  double pos = 0;
  for (auto v : y) pos += v;
  EXPECT_NEAR(pos, 200.0, 3.0 * std::sqrt(20000 * 0.01 * 0.99));
  EXPECT_GT(t.missing_count(), 0u);
}

TEST(SyntheticTest, DeterministicForSeed) {
  const auto a = generate_synthetic(2000, 0.05, 4, 7);
  const auto b = generate_synthetic(2000, 0.05, 4, 7);
  const auto c = generate_synthetic(2000, 0.05, 4, 8);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  std::ostringstream sa, sb;
  write_csv(a, sa);
  write_csv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(SyntheticTest, ParameterRanges) {
  EXPECT_THROW(generate_synthetic(9, 0.1, 2, 0), ArgumentError);
  EXPECT_THROW(generate_synthetic(100, 0.5, 2, 0), ArgumentError);
  EXPECT_THROW(generate_synthetic(100, 0.0, 2, 0), ArgumentError);
  EXPECT_THROW(generate_synthetic(100, 0.1, 16, 0), ArgumentError);
  EXPECT_NO_THROW(generate_synthetic(100, 0.49, 15, 0));
}

TEST(SyntheticTest, InformativeColumnSeparatesClasses) {
  const auto t = generate_synthetic(20000, 0.01, 6, 0);
  const auto y = t.labels();
  const auto c = t.column_index(synthetic_informative_order().front());
  std::vector<double> pos, neg;
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    if (t.is_missing(c, r)) continue;
    (y[r] ? pos : neg).push_back(t.values(c)[r]);
  }
  EXPECT_LT(mann_whitney_u(pos, neg).p_value, 0.01);
}

TEST(MatrixTest, ToMatrixRejectsMissing) {
  const auto t = make_table({{1.0, kNaN}, {3.0, 4.0}}, {0, 1});
  const std::vector<std::size_t> cols = {0, 1};
  const std::vector<std::size_t> first = {0};
  const auto m = to_matrix(t, first, cols);
  EXPECT_EQ(m(0, 1), 3.0);
  const auto rows = all_rows(t);
  EXPECT_THROW(to_matrix(t, rows, cols), DataError);
}

}  // namespace
}  // namespace backorder
