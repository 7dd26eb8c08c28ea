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

#include "backorder/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "backorder/classifier.hpp"
#include "backorder/error.hpp"
#include "backorder/stats.hpp"

namespace backorder {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ArgumentError("labels and scores differ in length (" + std::to_string(a) + " vs " +
                        std::to_string(b) + ")");
  }
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const std::uint8_t> y) {
  std::size_t pos = 0;
  for (auto v : y) pos += v ? 1 : 0;
  return {pos, y.size() - pos};
}

// Row order by descending score.
std::vector<std::size_t> descending_order(std::span<const double> p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  return order;
}

double ratio(double num, double den, const char* name, std::vector<std::string>& flags) {
  if (den == 0.0) {
    flags.emplace_back(name);
    return 0.0;
  }
  return num / den;
}

}  // namespace

std::vector<std::uint8_t> predict_labels(const Classifier& model, const FeatureMatrix& x,
                                         double threshold) {
  const auto prob = model.predict_proba(x);
  std::vector<std::uint8_t> out(prob.size());
  for (std::size_t i = 0; i < prob.size(); ++i) out[i] = prob[i] >= threshold ? 1 : 0;
  return out;
}

ConfusionMatrix confusion(std::span<const std::uint8_t> y_true, std::span<const double> y_prob,
                          double threshold) {
  check_lengths(y_true.size(), y_prob.size());
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool pred = y_prob[i] >= threshold;
    if (y_true[i]) {
      (pred ? cm.tp : cm.fn)++;
    } else {
      (pred ? cm.fp : cm.tn)++;
    }
  }
  return cm;
}

ConfusionMatrix confusion_from_labels(std::span<const std::uint8_t> y_true,
                                      std::span<const std::uint8_t> y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i]) {
      (y_pred[i] ? cm.tp : cm.fn)++;
    } else {
      (y_pred[i] ? cm.fp : cm.tn)++;
    }
  }
  return cm;
}

double roc_auc(std::span<const std::uint8_t> y_true, std::span<const double> y_prob) {
  check_lengths(y_true.size(), y_prob.size());
  const auto [pos, neg] = class_counts(y_true);
  if (pos == 0 || neg == 0) {
    throw DataError("roc_auc needs both classes (positives " + std::to_string(pos) +
                    ", negatives " + std::to_string(neg) + ")");
  }
  const auto ranks = midranks(y_prob);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (y_true[i]) rank_sum += ranks[i];
  }
  const double np = static_cast<double>(pos);
  const double nn = static_cast<double>(neg);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double pr_auc(std::span<const std::uint8_t> y_true, std::span<const double> y_prob) {
  check_lengths(y_true.size(), y_prob.size());
  const auto [pos, neg] = class_counts(y_true);
  (void)neg;
  if (pos == 0) throw DataError("pr_auc needs at least one positive row");
  const auto order = descending_order(y_prob);
  double area = 0.0;
  std::size_t tp = 0, seen = 0, prev_tp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double score = y_prob[order[i]];
    while (i < order.size() && y_prob[order[i]] == score) {
      tp += y_true[order[i]] ? 1 : 0;
      ++seen;
      ++i;
    }
    if (tp != prev_tp) {
      area += (static_cast<double>(tp) / static_cast<double>(seen)) *
              (static_cast<double>(tp - prev_tp) / static_cast<double>(pos));
      prev_tp = tp;
    }
  }
  return area;
}

double brier_score(std::span<const std::uint8_t> y_true, std::span<const double> y_prob) {
  check_lengths(y_true.size(), y_prob.size());
  if (y_true.empty()) throw DataError("brier score needs at least one row");
  double sum = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_prob[i] - static_cast<double>(y_true[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(y_true.size());
}

CountMetrics count_metrics(const ConfusionMatrix& cm) {
  CountMetrics m;
  const double tp = static_cast<double>(cm.tp);
  const double fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn);
  const double tn = static_cast<double>(cm.tn);
  m.precision = ratio(tp, tp + fp, "precision", m.degenerate);
  m.recall = ratio(tp, tp + fn, "recall", m.degenerate);
  m.f1_positive = ratio(2.0 * tp, 2.0 * tp + fp + fn, "f1_positive", m.degenerate);
  m.f1_negative = ratio(2.0 * tn, 2.0 * tn + fn + fp, "f1_negative", m.degenerate);
  m.macro_f1 = (m.f1_positive + m.f1_negative) / 2.0;
  // A margin product below 2^53 is exact, so one square root suffices. Larger
  // counts take paired roots, which keep the value symmetric under a class swap.
  const double pair_a = (tp + fp) * (tn + fn), pair_b = (tp + fn) * (tn + fp);
  const double product = pair_a * pair_b;
  const double den = product < 9007199254740992.0 ? std::sqrt(product)
                                                  : std::sqrt(pair_a) * std::sqrt(pair_b);
  m.mcc = ratio(tp * tn - fp * fn, den, "mcc", m.degenerate);
  return m;
}

MetricsReport summary_metrics(const ConfusionMatrix& cm, std::span<const std::uint8_t> y_true,
                              std::span<const double> y_prob, double threshold) {
  check_lengths(y_true.size(), y_prob.size());
  if (cm.total() != y_true.size()) {
    throw ArgumentError("confusion matrix covers " + std::to_string(cm.total()) +
                        " rows but " + std::to_string(y_true.size()) + " were scored");
  }
  const auto counts = count_metrics(cm);
  MetricsReport report;
  report.confusion = cm;
  report.threshold = threshold;
  report.precision = counts.precision;
  report.recall = counts.recall;
  report.macro_f1 = counts.macro_f1;
  report.mcc = counts.mcc;
  report.degenerate = counts.degenerate;
  report.brier = brier_score(y_true, y_prob);

  const auto [pos, neg] = class_counts(y_true);
  if (pos > 0 && neg > 0) {
    report.roc_auc = roc_auc(y_true, y_prob);
  } else {
    report.degenerate.emplace_back("roc_auc");
  }
  if (pos > 0) {
    report.pr_auc = pr_auc(y_true, y_prob);
  } else {
    report.degenerate.emplace_back("pr_auc");
  }
  return report;
}

MetricsReport evaluate_scores(std::span<const std::uint8_t> y_true,
                              std::span<const double> y_prob, double threshold) {
  return summary_metrics(confusion(y_true, y_prob, threshold), y_true, y_prob, threshold);
}

std::vector<CurvePoint> roc_curve(std::span<const std::uint8_t> y_true,
                                  std::span<const double> y_prob) {
  check_lengths(y_true.size(), y_prob.size());
  const auto [pos, neg] = class_counts(y_true);
  if (pos == 0 || neg == 0) throw DataError("roc curve needs both classes");
  const auto order = descending_order(y_prob);
  std::vector<CurvePoint> out;
  out.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double score = y_prob[order[i]];
    while (i < order.size() && y_prob[order[i]] == score) {
      (y_true[order[i]] ? tp : fp)++;
      ++i;
    }
    out.push_back({score, static_cast<double>(fp) / static_cast<double>(neg),
                   static_cast<double>(tp) / static_cast<double>(pos)});
  }
  return out;
}

std::vector<CurvePoint> pr_curve(std::span<const std::uint8_t> y_true,
                                 std::span<const double> y_prob) {
  check_lengths(y_true.size(), y_prob.size());
  const auto [pos, neg] = class_counts(y_true);
  (void)neg;
  if (pos == 0) throw DataError("pr curve needs at least one positive row");
  const auto order = descending_order(y_prob);
  std::vector<CurvePoint> out;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double score = y_prob[order[i]];
    while (i < order.size() && y_prob[order[i]] == score) {
      tp += y_true[order[i]] ? 1 : 0;
      ++seen;
      ++i;
    }
    out.push_back({score, static_cast<double>(tp) / static_cast<double>(pos),
                   static_cast<double>(tp) / static_cast<double>(seen)});
  }
  return out;
}

std::string to_string(ThresholdObjective objective) {
  return objective == ThresholdObjective::kMinCost ? "min-cost" : "max-macro-f1";
}

ThresholdObjective parse_threshold_objective(const std::string& name) {
  if (name == "min-cost") return ThresholdObjective::kMinCost;
  if (name == "max-macro-f1") return ThresholdObjective::kMaxMacroF1;
  throw ArgumentError("unknown threshold objective '" + name +
                      "' (expected min-cost or max-macro-f1)");
}

ThresholdChoice optimize_threshold(std::span<const std::uint8_t> y_true,
                                   std::span<const double> y_prob,
                                   ThresholdObjective objective, double fp_cost,
                                   double fn_cost) {
  check_lengths(y_true.size(), y_prob.size());
  const auto [pos, neg] = class_counts(y_true);
  if (pos == 0 || neg == 0) throw DataError("threshold search needs both classes");
  if (fp_cost < 0.0 || fn_cost < 0.0) throw ArgumentError("costs must be non-negative");

  std::vector<double> candidates(y_prob.begin(), y_prob.end());
  candidates.push_back(0.0);
  candidates.push_back(1.0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Ascending sweep: rows with score < t are predicted negative.
  std::vector<std::size_t> order(y_prob.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return y_prob[a] < y_prob[b]; });

  ThresholdChoice best;
  best.candidates = candidates.size();
  bool have = false;
  std::size_t below_pos = 0, below_neg = 0, cursor = 0;
  for (double t : candidates) {
    while (cursor < order.size() && y_prob[order[cursor]] < t) {
      (y_true[order[cursor]] ? below_pos : below_neg)++;
      ++cursor;
    }
    ConfusionMatrix cm{pos - below_pos, neg - below_neg, below_pos, below_neg};
    const double value =
        objective == ThresholdObjective::kMinCost
            ? static_cast<double>(cm.fp) * fp_cost + static_cast<double>(cm.fn) * fn_cost
            : count_metrics(cm).macro_f1;
    const bool better = !have || (objective == ThresholdObjective::kMinCost
                                      ? value <= best.objective
                                      : value >= best.objective);
    if (better) {
      best.threshold = t;
      best.objective = value;
      best.confusion = cm;
      have = true;
    }
  }
  return best;
}

}  // namespace backorder
