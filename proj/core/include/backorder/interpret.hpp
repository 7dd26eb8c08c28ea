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

#ifndef BACKORDER_INTERPRET_HPP_
#define BACKORDER_INTERPRET_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "backorder/classifier.hpp"
#include "backorder/dataset.hpp"

namespace backorder {

enum class ImportanceMetric { kRocAuc, kPrAuc };

std::string to_string(ImportanceMetric metric);
ImportanceMetric parse_importance_metric(const std::string& name);

struct FeatureImportance {
  std::string feature;
  std::size_t index = 0;   // column in the model's input
  double mean_drop = 0.0;  // baseline - permuted score, averaged
  double std_dev = 0.0;    // sample standard deviation; 0 with one repeat
  std::vector<double> drops;
};

struct ImportanceReport {
  ImportanceMetric metric = ImportanceMetric::kRocAuc;
  double baseline = 0.0;
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  std::vector<FeatureImportance> features;  // model input order

  // Descending mean drop; ties keep input order.
  std::vector<FeatureImportance> ranked() const;
};

struct ImportanceOptions {
  ImportanceMetric metric = ImportanceMetric::kRocAuc;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  // Restrict to these feature names; empty means all.
  std::vector<std::string> features;
};

// Shuffles one column at a time in a private copy of `x`. Each (feature,
// repeat) pair draws from its own seed stream, so the report does not depend
// on evaluation order or thread count.
ImportanceReport permutation_importance(const Classifier& model, const FeatureMatrix& x,
                                        std::span<const std::uint8_t> y,
                                        std::span<const std::string> feature_names,
                                        const ImportanceOptions& options = {});

}  // namespace backorder

#endif  // BACKORDER_INTERPRET_HPP_
