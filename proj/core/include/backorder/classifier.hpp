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

#ifndef BACKORDER_CLASSIFIER_HPP_
#define BACKORDER_CLASSIFIER_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "backorder/dataset.hpp"

namespace backorder {

// Anything that scores rows with a probability of the positive (backorder)
// class.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::vector<double> predict_proba(const FeatureMatrix& x) const = 0;
  virtual std::size_t n_features() const = 0;
  virtual std::string kind() const = 0;
};

// Label 1 iff probability >= threshold.
std::vector<std::uint8_t> predict_labels(const Classifier& model, const FeatureMatrix& x,
                                         double threshold = 0.5);

}  // namespace backorder

#endif  // BACKORDER_CLASSIFIER_HPP_
