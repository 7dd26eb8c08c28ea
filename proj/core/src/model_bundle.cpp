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

#include "backorder/model_bundle.hpp"

#include "backorder/error.hpp"
#include "backorder/random.hpp"

namespace backorder {

DummyClassifier::DummyClassifier(DummyMode mode, std::size_t n_features, std::uint64_t seed,
                                 double constant)
    : mode_(mode), n_features_(n_features), seed_(seed), constant_(constant) {
  if (!(constant >= 0.0 && constant <= 1.0)) {
    throw ArgumentError("dummy constant must lie in [0, 1]");
  }
}

std::vector<double> DummyClassifier::predict_proba(const FeatureMatrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != n_features_) {
    throw ArgumentError("dummy model expects " + std::to_string(n_features_) +
                        " feature columns, got " + std::to_string(x.cols()));
  }
  std::vector<double> out(static_cast<std::size_t>(x.rows()), constant_);
  if (mode_ == DummyMode::kUniform) {
    Rng rng(seed_);
    for (auto& v : out) v = rng.uniform();
  }
  return out;
}

std::string to_string(DummyMode mode) {
  return mode == DummyMode::kUniform ? "uniform" : "constant";
}

DummyMode parse_dummy_mode(const std::string& name) {
  if (name == "uniform") return DummyMode::kUniform;
  if (name == "constant") return DummyMode::kConstant;
  throw ArgumentError("unknown dummy mode '" + name + "' (expected uniform or constant)");
}

const Classifier& ModelBundle::classifier() const {
  return std::visit([](const auto& m) -> const Classifier& { return m; }, model);
}

DataTable ModelBundle::imputed(const DataTable& raw) const {
  return imputer ? impute(*imputer, raw) : raw;
}

FeatureMatrix ModelBundle::features(const DataTable& raw,
                                    std::span<const std::size_t> rows) const {
  DataTable table = imputed(raw);
  if (transform) table = apply_transform(*transform, table);
  std::vector<std::size_t> cols;
  cols.reserve(input_columns.size());
  for (const auto& name : input_columns) cols.push_back(table.column_index(name));
  FeatureMatrix x = to_matrix(table, rows, cols);
  if (vae) x = encode_and_augment(*vae, x);
  return x;
}

std::vector<double> ModelBundle::predict_proba(const DataTable& raw,
                                               std::span<const std::size_t> rows) const {
  return classifier().predict_proba(features(raw, rows));
}

std::vector<std::string> ModelBundle::feature_names() const {
  auto names = input_columns;
  if (vae) {
    for (std::size_t i = 0; i < vae->latent_dim(); ++i) names.push_back("latent" + std::to_string(i));
  }
  return names;
}

}  // namespace backorder
