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

#ifndef BACKORDER_MODEL_BUNDLE_HPP_
#define BACKORDER_MODEL_BUNDLE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "backorder/classifier.hpp"
#include "backorder/dataset.hpp"
#include "backorder/neural.hpp"
#include "backorder/preprocess.hpp"
#include "backorder/tree_ensemble.hpp"

namespace backorder {

enum class DummyMode { kUniform, kConstant };

// Chance-level baseline. Uniform mode draws one U(0,1) score per row from a
// fixed seed, so repeated calls on the same matrix agree; constant mode
// always returns `constant`.
class DummyClassifier final : public Classifier {
 public:
  DummyClassifier() = default;
  DummyClassifier(DummyMode mode, std::size_t n_features, std::uint64_t seed,
                  double constant = 0.5);

  std::vector<double> predict_proba(const FeatureMatrix& x) const override;
  std::size_t n_features() const override { return n_features_; }
  std::string kind() const override { return "dummy"; }

  DummyMode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  double constant() const { return constant_; }

 private:
  DummyMode mode_ = DummyMode::kUniform;
  std::size_t n_features_ = 0;
  std::uint64_t seed_ = 0;
  double constant_ = 0.5;
};

std::string to_string(DummyMode mode);
DummyMode parse_dummy_mode(const std::string& name);

// A fitted model together with the preprocessing chain it was trained
// behind, so raw tables can be scored directly.
struct ModelBundle {
  std::string model_kind;                  // dummy, bbc, vae_bbc, random_forest, mlp
  std::vector<std::string> input_columns;  // feature columns of the raw table
  std::optional<ImputerModel> imputer;
  std::optional<FittedTransform> transform;
  std::optional<VaeModel> vae;
  std::variant<DummyClassifier, BaggedEnsemble, MlpClassifier> model;

  const Classifier& classifier() const;

  // Imputed (untransformed) copy of `raw`.
  DataTable imputed(const DataTable& raw) const;
  // Model-ready matrix for `rows` of `raw`: impute, transform, select the
  // input columns and append latent means when a VAE is attached.
  FeatureMatrix features(const DataTable& raw, std::span<const std::size_t> rows) const;
  std::vector<double> predict_proba(const DataTable& raw,
                                    std::span<const std::size_t> rows) const;
  // Names of the model's input columns, latent columns included.
  std::vector<std::string> feature_names() const;
};

}  // namespace backorder

#endif  // BACKORDER_MODEL_BUNDLE_HPP_
