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

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "backorder/dataset.hpp"
#include "backorder/economics.hpp"
#include "backorder/error.hpp"
#include "backorder/evaluate.hpp"
#include "backorder/random.hpp"

namespace backorder {
namespace {

DataTable one_row(double inventory, const std::string& sales) {
  std::ostringstream text;
  text << "nationalInv,leadTime,inTransitQty,forecast3Month,forecast6Month,forecast9Month,"
          "sales1Month,sales3Month,sales6Month,sales9Month,minBank,potentialIssue,"
          "piecesPastDue,perf6MonthAvg,perf12MonthAvg,localBoQty,deckRisk,oeConstraint,"
          "ppapRisk,stopAutoBuy,revStop,wentOnBackorder\n"
       << inventory << ",4,0,0,0,0," << sales << ",0,No,0,0.5,0.5,0,Yes,No,No,No,No,Yes\n";
  std::istringstream in(text.str());
  return read_csv(in, inventory_schema());
}

DataTable complete_synthetic(std::size_t n, std::uint64_t seed) {
  SyntheticOptions o;
  o.n_rows = n;
  o.positive_rate = 0.05;
  o.seed = seed;
  o.missing_rate = 0.0;
  return generate_synthetic(o);
}

TEST(RevenueTest, Arithmetic) {
  const auto t = one_row(10, "1,2,3,4");
  const std::vector<std::size_t> rows = {0};
  EXPECT_EQ(revenue(t, rows), 10.0);
  EXPECT_EQ(revenue(t, std::vector<std::size_t>{}), 0.0);
}

TEST(RevenueTest, ColumnSumOracle) {
  const auto t = complete_synthetic(3000, 1);
  const auto rows = all_rows(t);
  double expected = 0.0;
  for (const char* name : {"sales1Month", "sales3Month", "sales6Month", "sales9Month"}) {
    for (double v : t.values(t.column_index(name))) expected += v;
  }
  EXPECT_NEAR(revenue(t, rows), expected, 1e-9 * std::abs(expected));
}

TEST(ProfitTest, SingleTermAndZeroCosts) {
  const auto t = one_row(10, "1,2,3,4");
  const std::vector<std::size_t> rows = {0};
  const std::vector<std::uint8_t> ind = {1};
  EXPECT_EQ(profit(t, rows, CostParams{}, ind).profit, 10.0);
  CostParams p;
  p.holding_cost = 2.0;
  const auto r = profit(t, rows, p, ind);
  EXPECT_EQ(r.profit, 10.0 - 20.0);
  EXPECT_EQ(r.terms[0], 20.0);
  // Lead time 4, one backorder, deckRisk yes, potentialIssue no.
  const auto d = cost_drivers(t, rows, ind);
  EXPECT_EQ(d.sums, (std::array<double, kCostTerms>{10, 1, 4, 0, 1}));
  EXPECT_THROW(profit(t, rows, p, std::vector<std::uint8_t>{}), ArgumentError);
}

TEST(ProfitTest, BreakdownReconcilesAndIsLinear) {
  const auto t = complete_synthetic(2000, 2);
  const auto rows = all_rows(t);
  const auto ind = t.labels();
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<double, kCostTerms> a{};
    for (auto& v : a) v = rng.uniform(0, 3);
    const auto params = CostParams::from_array(a);
    const auto r = profit(t, rows, params, ind);
    double terms = 0.0;
    for (double v : r.terms) terms += v;
    ASSERT_NEAR(r.revenue - terms, r.profit, 1e-9 * std::abs(r.revenue));

    const double alpha = rng.uniform();
    std::array<double, kCostTerms> scaled = a;
    for (auto& v : scaled) v *= alpha;
    const auto rs = profit(t, rows, CostParams::from_array(scaled), ind);
    ASSERT_NEAR(rs.profit, (1 - alpha) * r.revenue + alpha * r.profit,
                1e-9 * std::abs(r.revenue));

    // Raising one cost never raises profit.
    const std::size_t k = rng.index(kCostTerms);
    auto bumped = a;
    bumped[k] += rng.uniform(0, 2);
    ASSERT_LE(profit(t, rows, CostParams::from_array(bumped), ind).profit, r.profit);
  }
}

TEST(OptimizerTest, NonNegativeOptimumIsZeroCosts) {
  const auto t = complete_synthetic(2000, 4);
  const auto rows = all_rows(t);
  const auto ind = t.labels();
  CostParams x0;
  x0.holding_cost = 3;
  x0.backorder_cost = 1;
  const auto r = maximize_profit(t, rows, ind, x0, ProfitConstraints::non_negative());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.params, CostParams{});
  EXPECT_NEAR(r.profit, revenue(t, rows), 1e-9 * r.revenue);
}

TEST(OptimizerTest, EqualityConstraint) {
  const auto t = complete_synthetic(2000, 5);
  const auto rows = all_rows(t);
  const auto ind = t.labels();
  auto c = ProfitConstraints::non_negative();
  c.fixed[0] = 1.0;
  CostParams x0;
  x0.lead_time_cost = 2;
  const auto r = maximize_profit(t, rows, ind, x0, c);
  double inventory = 0.0;
  for (double v : t.values(t.column_index("nationalInv"))) inventory += v;
  EXPECT_EQ(r.params.holding_cost, 1.0);
  EXPECT_EQ(r.params.lead_time_cost, 0.0);
  EXPECT_NEAR(r.profit, revenue(t, rows) - inventory, 1e-9 * r.revenue);
}

// Brute force over the 2^5 vertices of the box.
double best_vertex(const CostDrivers& d, double lo, double hi, CostParams* arg) {
  double best = -std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < 32; ++mask) {
    std::array<double, kCostTerms> a{};
    for (std::size_t k = 0; k < kCostTerms; ++k) a[k] = (mask >> k) & 1 ? hi : lo;
    const double v = profit(d, CostParams::from_array(a)).profit;
    if (v > best) {
      best = v;
      *arg = CostParams::from_array(a);
    }
  }
  return best;
}

TEST(OptimizerTest, BoxMatchesVertexEnumeration) {
  CostDrivers d;
  d.sums = {120.0, 7.0, 33.0, 2.0, 5.0};
  d.revenue = 1000.0;
  CostParams corner;
  const double best = best_vertex(d, 1.0, 2.0, &corner);
  CostParams x0 = CostParams::from_array({1.5, 1.5, 1.5, 1.5, 1.5});
  const auto r = maximize_profit(d, x0, ProfitConstraints::box(1.0, 2.0));
  EXPECT_NEAR(r.profit, best, 1e-8);
  EXPECT_EQ(corner, CostParams::from_array({1, 1, 1, 1, 1}));
  for (std::size_t k = 0; k < kCostTerms; ++k) {
    EXPECT_NEAR(r.params.to_array()[k], 1.0, 1e-8);
  }
}

TEST(OptimizerTest, CertificateOnRandomBoxes) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    CostDrivers d;
    for (auto& s : d.sums) s = rng.uniform(-50, 50);
    d.revenue = rng.uniform(0, 1000);
    const double lo = rng.uniform(-3, 1), hi = lo + rng.uniform(0.1, 4);
    std::array<double, kCostTerms> start{};
    for (auto& v : start) v = rng.uniform(lo, hi);
    const auto r = maximize_profit(d, CostParams::from_array(start), ProfitConstraints::box(lo, hi));
    CostParams arg;
    const double best = best_vertex(d, lo, hi, &arg);
    ASSERT_GE(r.profit, best - 1e-8);
    ASSERT_TRUE(r.converged);
  }
}

TEST(OptimizerTest, Errors) {
  CostDrivers d;
  d.sums = {10, 1, 1, 1, 1};
  d.revenue = 100;
  EXPECT_THROW(maximize_profit(d, CostParams{}, ProfitConstraints::holding_only()), DataError);
  auto bad = ProfitConstraints::non_negative();
  bad.bounds[2] = {3.0, 1.0};
  EXPECT_THROW(maximize_profit(d, CostParams{}, bad), ArgumentError);
  auto fixed = ProfitConstraints::box(0, 1);
  fixed.fixed[1] = 5.0;
  EXPECT_THROW(maximize_profit(d, CostParams{}, fixed), ArgumentError);
  // A free cost whose driver sums to zero leaves the objective bounded.
  CostDrivers flat;
  flat.sums = {10, 0, 0, 0, 0};
  flat.revenue = 100;
  EXPECT_NO_THROW(maximize_profit(flat, CostParams{}, ProfitConstraints::holding_only()));
}

TEST(MisclassificationTest, Arithmetic) {
  ConfusionMatrix cm;
  cm.fp = 17506;
  cm.fn = 180;
  EXPECT_EQ(misclassification_cost(cm).total, 175240.0);
  EXPECT_EQ(misclassification_cost(cm, 20, 2).total, 2 * 175240.0);
  EXPECT_EQ(misclassification_cost(ConfusionMatrix{}).total, 0.0);
  EXPECT_THROW(misclassification_cost(cm, -1, 1), ArgumentError);
}

TEST(CostNamesTest, Order) {
  const auto& n = cost_term_names();
  EXPECT_EQ(n[0], "holding_cost");
  EXPECT_EQ(n[4], "deck_risk_cost");
  const auto p = CostParams::from_array({1, 2, 3, 4, 5});
  EXPECT_EQ(p.lead_time_cost, 3.0);
  EXPECT_EQ(p.to_array()[4], 5.0);
}

}  // namespace
}  // namespace backorder
