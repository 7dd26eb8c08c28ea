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

#ifndef BACKORDER_EVALUATE_HPP_
#define BACKORDER_EVALUATE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace backorder {

// Class 1 (went on backorder) is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// Predicted 1 iff prob >= threshold.
ConfusionMatrix confusion(std::span<const std::uint8_t> y_true, std::span<const double> y_prob,
                          double threshold = 0.5);
ConfusionMatrix confusion_from_labels(std::span<const std::uint8_t> y_true,
                                      std::span<const std::uint8_t> y_pred);

// Rank statistic with midranks; ties between a positive and a negative count 1/2.
double roc_auc(std::span<const std::uint8_t> y_true, std::span<const double> y_prob);
// Step-wise sum of precision * delta recall over distinct score thresholds.
double pr_auc(std::span<const std::uint8_t> y_true, std::span<const double> y_prob);
double brier_score(std::span<const std::uint8_t> y_true, std::span<const double> y_prob);

// Metrics that depend only on the confusion matrix. A zero denominator yields 0
// and the metric's name in `degenerate`.
struct CountMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1_positive = 0.0;
  double f1_negative = 0.0;
  double macro_f1 = 0.0;
  double mcc = 0.0;
  std::vector<std::string> degenerate;
};

CountMetrics count_metrics(const ConfusionMatrix& cm);

struct MetricsReport {
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  double macro_f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double mcc = 0.0;
  double brier = 0.0;
  ConfusionMatrix confusion;
  double threshold = 0.5;
  std::vector<std::string> degenerate;
};

MetricsReport summary_metrics(const ConfusionMatrix& cm, std::span<const std::uint8_t> y_true,
                              std::span<const double> y_prob, double threshold = 0.5);
// Tallies the confusion matrix at `threshold` first.
MetricsReport evaluate_scores(std::span<const std::uint8_t> y_true,
                              std::span<const double> y_prob, double threshold = 0.5);

struct CurvePoint {
  double threshold = 0.0;
  double x = 0.0;  // FPR for ROC, recall for PR
  double y = 0.0;  // TPR for ROC, precision for PR
};

// One point per distinct score, highest threshold first. The ROC curve starts
// at (0, 0) with an infinite threshold.
std::vector<CurvePoint> roc_curve(std::span<const std::uint8_t> y_true,
                                  std::span<const double> y_prob);
std::vector<CurvePoint> pr_curve(std::span<const std::uint8_t> y_true,
                                 std::span<const double> y_prob);

enum class ThresholdObjective { kMinCost, kMaxMacroF1 };

std::string to_string(ThresholdObjective objective);
ThresholdObjective parse_threshold_objective(const std::string& name);

struct ThresholdChoice {
  double threshold = 0.5;
  double objective = 0.0;
  ConfusionMatrix confusion;
  std::size_t candidates = 0;
};

// Sweeps every distinct probability plus 0 and 1. Ties go to the higher
// threshold.
ThresholdChoice optimize_threshold(std::span<const std::uint8_t> y_true,
                                   std::span<const double> y_prob,
                                   ThresholdObjective objective, double fp_cost = 10.0,
                                   double fn_cost = 1.0);

}  // namespace backorder

#endif  // BACKORDER_EVALUATE_HPP_
