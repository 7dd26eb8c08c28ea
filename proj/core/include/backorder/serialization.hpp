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

#ifndef BACKORDER_SERIALIZATION_HPP_
#define BACKORDER_SERIALIZATION_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "backorder/economics.hpp"
#include "backorder/evaluate.hpp"
#include "backorder/interpret.hpp"
#include "backorder/model_bundle.hpp"
#include "backorder/neural.hpp"
#include "backorder/preprocess.hpp"
#include "backorder/stats.hpp"
#include "backorder/tree_ensemble.hpp"

namespace backorder {

using Json = nlohmann::ordered_json;

// Bumped whenever a stored layout changes incompatibly.
inline constexpr int kModelFormatVersion = 1;

Json serialize(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

Json serialize(const FittedTransform& t);
FittedTransform transform_from_json(const Json& j);

Json serialize(const ImputerModel& m);
ImputerModel imputer_from_json(const Json& j);

Json serialize(const DecisionTree& tree);
DecisionTree tree_from_json(const Json& j);

Json serialize(const EnsembleConfig& c);
EnsembleConfig ensemble_config_from_json(const Json& j);

Json serialize(const BaggedEnsemble& e);
BaggedEnsemble ensemble_from_json(const Json& j);

Json serialize(const Network& n);
Network network_from_json(const Json& j);

Json serialize(const VaeModel& m);
VaeModel vae_from_json(const Json& j);

Json serialize(const DummyClassifier& d);
DummyClassifier dummy_from_json(const Json& j);

Json serialize(const ModelBundle& b);
ModelBundle bundle_from_json(const Json& j);

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
// Throws ParseError on malformed or incompatible documents.
ModelBundle load_bundle(const std::filesystem::path& path);

// Reports (write-only).
Json serialize(const ConfusionMatrix& cm);
Json serialize(const MetricsReport& m);
Json serialize(const ThresholdChoice& t);
Json serialize(const ProfitResult& p);
Json serialize(const MisclassificationCost& c);
Json serialize(const ImportanceReport& r);  // features in ranked order
Json serialize(const TrainReport& r);
Json serialize(const GridSearchResult& g);
Json serialize(const std::vector<ScreeningRow>& rows);

// Writes `j` with two-space indentation and a trailing newline.
void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

}  // namespace backorder

#endif  // BACKORDER_SERIALIZATION_HPP_
