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

#include "backorder/economics.hpp"

#include <algorithm>
#include <cmath>

#include "backorder/error.hpp"

namespace backorder {
namespace {

constexpr std::array<const char*, 4> kSalesColumns = {"sales1Month", "sales3Month",
                                                      "sales6Month", "sales9Month"};

double column_sum(const DataTable& table, std::size_t col, std::span<const std::size_t> rows) {
  double sum = 0.0;
  for (auto r : rows) {
    if (r >= table.row_count()) throw ArgumentError("row index out of range");
    if (table.is_missing(col, r)) {
      throw DataError("column " + table.schema()[col].name + " is missing at row " +
                      std::to_string(r) + "; impute before economic scoring");
    }
    sum += table.values(col)[r];
  }
  return sum;
}

}  // namespace

const std::array<std::string, kCostTerms>& cost_term_names() {
  static const std::array<std::string, kCostTerms> names = {
      "holding_cost", "backorder_cost", "lead_time_cost", "potential_issue_cost",
      "deck_risk_cost"};
  return names;
}

std::array<double, kCostTerms> CostParams::to_array() const {
  return {holding_cost, backorder_cost, lead_time_cost, potential_issue_cost, deck_risk_cost};
}

CostParams CostParams::from_array(const std::array<double, kCostTerms>& v) {
  return CostParams{v[0], v[1], v[2], v[3], v[4]};
}

double revenue(const DataTable& table, std::span<const std::size_t> rows) {
  double total = 0.0;
  for (const char* name : kSalesColumns) {
    total += column_sum(table, table.column_index(name), rows);
  }
  return total;
}

CostDrivers cost_drivers(const DataTable& table, std::span<const std::size_t> rows,
                         std::span<const std::uint8_t> backorder_indicator) {
  if (backorder_indicator.size() != rows.size()) {
    throw ArgumentError("backorder indicator has " + std::to_string(backorder_indicator.size()) +
                        " entries for " + std::to_string(rows.size()) + " rows");
  }
  CostDrivers d;
  d.revenue = revenue(table, rows);
  d.sums[0] = column_sum(table, table.column_index("nationalInv"), rows);
  double backorders = 0.0;
  for (auto v : backorder_indicator) backorders += v ? 1.0 : 0.0;
  d.sums[1] = backorders;
  d.sums[2] = column_sum(table, table.column_index("leadTime"), rows);
  d.sums[3] = column_sum(table, table.column_index("potentialIssue"), rows);
  d.sums[4] = column_sum(table, table.column_index("deckRisk"), rows);
  return d;
}

ProfitResult profit(const CostDrivers& drivers, const CostParams& params) {
  ProfitResult r;
  r.revenue = drivers.revenue;
  r.params = params;
  const auto c = params.to_array();
  double cost = 0.0;
  for (std::size_t i = 0; i < kCostTerms; ++i) {
    r.terms[i] = c[i] * drivers.sums[i];
    cost += r.terms[i];
  }
  r.profit = r.revenue - cost;
  return r;
}

ProfitResult profit(const DataTable& table, std::span<const std::size_t> rows,
                    const CostParams& params, std::span<const std::uint8_t> backorder_indicator) {
  return profit(cost_drivers(table, rows, backorder_indicator), params);
}

ProfitConstraints ProfitConstraints::non_negative() { return ProfitConstraints{}; }

ProfitConstraints ProfitConstraints::holding_only() {
  ProfitConstraints c;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < kCostTerms; ++i) c.bounds[i] = Bound{-inf, inf};
  return c;
}

ProfitConstraints ProfitConstraints::box(double lower, double upper) {
  ProfitConstraints c;
  for (auto& b : c.bounds) b = Bound{lower, upper};
  return c;
}

ProfitResult maximize_profit(const CostDrivers& drivers, const CostParams& x0,
                             const ProfitConstraints& constraints,
                             const OptimizerOptions& options) {
  const auto& names = cost_term_names();
  std::array<double, kCostTerms> lo{}, hi{};
  for (std::size_t i = 0; i < kCostTerms; ++i) {
    lo[i] = constraints.bounds[i].lower;
    hi[i] = constraints.bounds[i].upper;
    if (std::isnan(lo[i]) || std::isnan(hi[i]) || lo[i] > hi[i]) {
      throw ArgumentError("infeasible constraints: " + names[i] + " has an empty bound");
    }
    if (constraints.fixed[i]) {
      const double v = *constraints.fixed[i];
      if (!std::isfinite(v) || v < lo[i] || v > hi[i]) {
        throw ArgumentError("infeasible constraints: " + names[i] + " fixed outside its bound");
      }
      lo[i] = hi[i] = v;
    }
  }

  // d(profit)/d(cost_i) = -driver_i, constant everywhere.
  std::array<double, kCostTerms> grad{};
  for (std::size_t i = 0; i < kCostTerms; ++i) {
    grad[i] = -drivers.sums[i];
    if ((grad[i] > 0.0 && std::isinf(hi[i])) || (grad[i] < 0.0 && std::isinf(lo[i]))) {
      throw DataError("profit is unbounded along " + names[i] + " (driver sum " +
                      std::to_string(drivers.sums[i]) + "); add a bound for it");
    }
  }

  auto x = x0.to_array();
  for (std::size_t i = 0; i < kCostTerms; ++i) {
    if (!std::isfinite(x[i])) throw ArgumentError("initial guess must be finite");
    x[i] = std::clamp(x[i], lo[i], hi[i]);
  }

  auto projected_norm = [&](const std::array<double, kCostTerms>& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < kCostTerms; ++i) {
      const bool blocked = (grad[i] > 0.0 && p[i] >= hi[i]) || (grad[i] < 0.0 && p[i] <= lo[i]);
      if (!blocked) s += grad[i] * grad[i];
    }
    return std::sqrt(s);
  };

  ProfitResult best = profit(drivers, CostParams::from_array(x));
  best.converged = false;
  double step = 1.0;
  std::size_t iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (projected_norm(x) < options.gradient_tolerance) {
      best.converged = true;
      break;
    }
    std::array<double, kCostTerms> next{};
    for (std::size_t i = 0; i < kCostTerms; ++i) {
      next[i] = std::clamp(x[i] + step * grad[i], lo[i], hi[i]);
    }
    const auto candidate = profit(drivers, CostParams::from_array(next));
    if (candidate.profit >= best.profit) {
      x = next;
      best = candidate;
    }
    step *= 2.0;
  }
  best.iterations = iter;
  best.converged = projected_norm(x) < options.gradient_tolerance;
  return best;
}

ProfitResult maximize_profit(const DataTable& table, std::span<const std::size_t> rows,
                             std::span<const std::uint8_t> backorder_indicator,
                             const CostParams& x0, const ProfitConstraints& constraints,
                             const OptimizerOptions& options) {
  return maximize_profit(cost_drivers(table, rows, backorder_indicator), x0, constraints,
                         options);
}

MisclassificationCost misclassification_cost(const ConfusionMatrix& cm, double fp_cost,
                                             double fn_cost) {
  if (!(fp_cost >= 0.0) || !(fn_cost >= 0.0)) {
    throw ArgumentError("misclassification costs must be non-negative");
  }
  MisclassificationCost out;
  out.fp_cost = fp_cost;
  out.fn_cost = fn_cost;
  out.fp = cm.fp;
  out.fn = cm.fn;
  out.total = static_cast<double>(cm.fp) * fp_cost + static_cast<double>(cm.fn) * fn_cost;
  return out;
}

}  // namespace backorder
