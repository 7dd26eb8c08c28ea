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

#ifndef BACKORDER_PIPELINE_HPP_
#define BACKORDER_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "backorder/dataset.hpp"
#include "backorder/economics.hpp"
#include "backorder/evaluate.hpp"
#include "backorder/interpret.hpp"
#include "backorder/model_bundle.hpp"
#include "backorder/neural.hpp"
#include "backorder/preprocess.hpp"
#include "backorder/serialization.hpp"
#include "backorder/stats.hpp"
#include "backorder/tree_ensemble.hpp"

namespace backorder {

// Library version recorded in provenance.
const char* version_string();

enum class ModelKind { kDummy, kBbc, kVaeBbc, kRandomForest, kMlp };
std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

enum class Resampling { kNone, kSmote, kBalancedBaggingInternal };
std::string to_string(Resampling r);
Resampling parse_resampling(const std::string& name);

enum class GridMode { kNone, kDesk, kFull };
std::string to_string(GridMode g);
GridMode parse_grid_mode(const std::string& name);

struct DataConfig {
  std::string source = "synthetic";  // synthetic | csv
  std::string path;                  // csv only
  SyntheticOptions synthetic;        // seed is taken from RunConfig::seed
};

struct SplitConfig {
  double train_fraction = 0.8;
  bool stratify = true;
};

struct SmoteConfig {
  std::size_t k = 5;
  double ratio = 1.0;
};

struct ModelConfig {
  ModelKind kind = ModelKind::kBbc;
  // Ensemble settings (bbc, vae_bbc, random_forest).
  std::size_t n_estimators = 200;
  double max_features = 1.0;
  bool bootstrap = true;
  bool bootstrap_features = false;
  std::optional<std::size_t> max_depth;
  std::size_t min_leaf = 1;
  std::optional<std::size_t> split_features;
  GridMode grid = GridMode::kNone;
  std::size_t cv_folds = 5;
  DummyMode dummy_mode = DummyMode::kUniform;
  VaeOptions vae;
  MlpOptions mlp;
  // Positive-class weight for the MLP; negatives / positives when empty.
  std::optional<double> class_weight;
};

struct EvaluationConfig {
  double threshold = 0.5;
  ThresholdObjective objective = ThresholdObjective::kMinCost;
  double fp_cost = 10.0;
  double fn_cost = 1.0;
  bool importance = true;
  std::size_t importance_repeats = 10;
  ImportanceMetric importance_metric = ImportanceMetric::kRocAuc;
  bool screening = true;
};

struct EconomicsConfig {
  std::string constraints = "non-negative";  // non-negative | holding-only | box
  double lower = 0.0;                        // box only
  double upper = 1.0;                        // box only
  std::string indicator = "predicted";       // predicted | actual
};

struct MatrixConfig {
  std::vector<ModelKind> models = {ModelKind::kDummy, ModelKind::kBbc, ModelKind::kVaeBbc,
                                   ModelKind::kRandomForest, ModelKind::kMlp};
  std::vector<TransformKind> transforms = {TransformKind::kRobust, TransformKind::kLogStandard,
                                           TransformKind::kQuantile, TransformKind::kStandard};
};

struct RunConfig {
  DataConfig data;
  SplitConfig split;
  ImputerOptions imputer;
  TransformKind transform = TransformKind::kRobust;
  Resampling resampling = Resampling::kNone;
  SmoteConfig smote;
  ModelConfig model;
  EvaluationConfig evaluation;
  EconomicsConfig economics;
  MatrixConfig matrix;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string output_dir = "out";
  // Row label in comparison tables; defaults to "<model>/<transform>".
  std::string label;
  // Where the config came from, used in diagnostics.
  std::string origin;
};

// Unknown keys and ill-typed values raise ArgumentError naming the key path.
RunConfig parse_run_config(const Json& j, const std::string& origin = "<inline>");
RunConfig load_run_config(const std::filesystem::path& path);
Json serialize(const RunConfig& c);
// BACKORDER_OUT_DIR and BACKORDER_THREADS override the output directory and
// thread count.
void apply_environment(RunConfig& c);
// FNV-1a over the canonical config, excluding thread count and output paths.
std::string config_hash(const RunConfig& c);
std::string row_label(const RunConfig& c);

struct PreparedData {
  DataTable raw;
  LoadReport load;
  SplitIndices split;
  ImputerModel imputer;
  DataTable imputed;
  FittedTransform transform;
  DataTable transformed;
};

PreparedData prepare_data(const RunConfig& c);

struct FittedModel {
  ModelBundle bundle;
  std::optional<TrainReport> train_report;
  std::optional<GridSearchResult> grid;
  std::size_t smote_synthetic = 0;
};

FittedModel fit_model(const RunConfig& c, const PreparedData& data);

struct ModelRow {
  std::string label;
  std::string model;
  std::string transform;
  std::string resampling;
  bool ok = true;
  std::string error;
  MetricsReport metrics;
  ThresholdChoice tuned;
  ProfitResult profit;
  MisclassificationCost cost;
};

struct ExperimentReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::size_t rows = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t train_positives = 0;
  std::size_t test_positives = 0;
  LoadReport load;
  std::size_t imputer_rounds = 0;
  bool imputer_converged = false;
  std::size_t smote_synthetic = 0;
  std::vector<ModelRow> models;
  std::optional<ImportanceReport> importance;
  std::vector<ScreeningRow> screening;
  std::optional<TrainReport> train_report;
  std::optional<GridSearchResult> grid;
};

Json serialize(const ExperimentReport& r);

struct ExperimentResult {
  ExperimentReport report;
  std::optional<ModelBundle> bundle;
  std::vector<double> test_scores;
  Labels test_labels;
};

// load/generate -> split -> impute -> transform -> (SMOTE) -> train ->
// evaluate -> economics -> importance -> screening. Writes report.json,
// provenance.json, metrics.csv, curves, importance.csv, screening.csv and
// model.json to the output directory when `write_outputs` is set. Failures are
// rethrown as StageError.
ExperimentResult run_experiment(const RunConfig& c, bool write_outputs = true);

// Scores a fitted bundle on the test split of `data`.
ModelRow score_model(const RunConfig& c, const PreparedData& data, const ModelBundle& bundle,
                     std::vector<double>* scores = nullptr);

// One config per (model, transform) of c.matrix, in that nesting order, with
// importance and screening switched off.
std::vector<RunConfig> expand_matrix(const RunConfig& c);

// Runs every config (concurrently up to `threads`) and merges their rows in
// config order. A failing config yields a row with ok = false.
ExperimentReport run_model_matrix(const std::vector<RunConfig>& configs, std::size_t threads);

// Comparison table with metrics at 4 decimals.
void write_comparison_csv(const std::vector<ModelRow>& rows, const std::filesystem::path& path);
void write_importance_csv(const ImportanceReport& r, const std::filesystem::path& path);
void write_screening_csv(const std::vector<ScreeningRow>& rows,
                         const std::filesystem::path& path);
void write_curve_csv(const std::vector<CurvePoint>& points, const std::string& x_name,
                     const std::string& y_name, const std::filesystem::path& path);

// Individual CLI stages. Each writes its artifacts under c.output_dir and
// returns a short summary.
Json run_prepare(const RunConfig& c);
Json run_screen(const RunConfig& c);
Json run_train(const RunConfig& c);
Json run_evaluate(const RunConfig& c, const std::filesystem::path& model_path);
Json run_importance(const RunConfig& c, const std::filesystem::path& model_path);
Json run_economics(const RunConfig& c, const std::filesystem::path& model_path);
Json run_synth(const RunConfig& c);
Json run_matrix(const RunConfig& c);

}  // namespace backorder

#endif  // BACKORDER_PIPELINE_HPP_
