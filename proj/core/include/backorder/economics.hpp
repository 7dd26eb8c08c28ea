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

#ifndef BACKORDER_ECONOMICS_HPP_
#define BACKORDER_ECONOMICS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "backorder/dataset.hpp"
#include "backorder/evaluate.hpp"

namespace backorder {

inline constexpr std::size_t kCostTerms = 5;

// Term order used by every array below.
const std::array<std::string, kCostTerms>& cost_term_names();

struct CostParams {
  double holding_cost = 0.0;
  double backorder_cost = 0.0;
  double lead_time_cost = 0.0;
  double potential_issue_cost = 0.0;
  double deck_risk_cost = 0.0;

  std::array<double, kCostTerms> to_array() const;
  static CostParams from_array(const std::array<double, kCostTerms>& values);
  bool operator==(const CostParams&) const = default;
};

// Per-term driver sums: inventory level (nationalInv), backorder count,
// lead time, potentialIssue flags, deckRisk flags.
struct CostDrivers {
  std::array<double, kCostTerms> sums{};
  double revenue = 0.0;
};

// Sum of the four sales columns over `rows`.
double revenue(const DataTable& table, std::span<const std::size_t> rows);

// `backorder_indicator` is aligned with `rows`.
CostDrivers cost_drivers(const DataTable& table, std::span<const std::size_t> rows,
                         std::span<const std::uint8_t> backorder_indicator);

struct ProfitResult {
  double revenue = 0.0;
  double profit = 0.0;
  std::array<double, kCostTerms> terms{};
  CostParams params;
  std::size_t iterations = 0;
  bool converged = true;
};

ProfitResult profit(const CostDrivers& drivers, const CostParams& params);
ProfitResult profit(const DataTable& table, std::span<const std::size_t> rows,
                    const CostParams& params, std::span<const std::uint8_t> backorder_indicator);

struct Bound {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

struct ProfitConstraints {
  std::array<Bound, kCostTerms> bounds{};
  // Equality constraints; a fixed value must lie within its bound.
  std::array<std::optional<double>, kCostTerms> fixed{};

  // Every cost non-negative (the default).
  static ProfitConstraints non_negative();
  // Only holding_cost >= 0; the rest are free.
  static ProfitConstraints holding_only();
  static ProfitConstraints box(double lower, double upper);
};

struct OptimizerOptions {
  std::size_t max_iterations = 1000;
  double gradient_tolerance = 1e-8;
};

// Gradient projection on the linear profit objective. Throws ArgumentError
// for an infeasible constraint set and DataError when the objective is
// unbounded in some direction.
ProfitResult maximize_profit(const CostDrivers& drivers, const CostParams& x0,
                             const ProfitConstraints& constraints,
                             const OptimizerOptions& options = {});
ProfitResult maximize_profit(const DataTable& table, std::span<const std::size_t> rows,
                             std::span<const std::uint8_t> backorder_indicator,
                             const CostParams& x0, const ProfitConstraints& constraints,
                             const OptimizerOptions& options = {});

struct MisclassificationCost {
  double fp_cost = 10.0;
  double fn_cost = 1.0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double total = 0.0;
};

MisclassificationCost misclassification_cost(const ConfusionMatrix& cm, double fp_cost = 10.0,
                                             double fn_cost = 1.0);

}  // namespace backorder

#endif  // BACKORDER_ECONOMICS_HPP_
