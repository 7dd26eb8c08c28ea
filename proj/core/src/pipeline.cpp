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

#include "backorder/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <type_traits>

#include "backorder/error.hpp"
#include "backorder/parallel.hpp"
#include "backorder/random.hpp"

#ifndef BACKORDER_VERSION
#define BACKORDER_VERSION "0.0.0"
#endif

namespace backorder {
namespace {

// Seed streams for the stochastic stages of a run.
enum SeedStream : std::uint64_t {
  kEnsembleStream = 10,
  kVaeStream = 11,
  kMlpStream = 12,
  kDummyStream = 13,
  kImportanceStream = 14,
  kGridStream = 15,
  kSmoteStream = 20,
};

// Pipeline streams hang off their own branch so they never coincide with the
// synthetic generator's streams of the same master seed.
std::uint64_t stream_seed(const RunConfig& c, std::uint64_t stream) {
  constexpr std::uint64_t kPipelineBranch = 0x70697065ULL;
  return derive_seed(derive_seed(c.seed, kPipelineBranch), stream);
}

template <typename F>
auto in_stage(const char* stage, const RunConfig& c, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, c.origin, e.what());
  }
}

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class ConfigReader {
 public:
  ConfigReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ArgumentError("config: '" + (path_.empty() ? std::string("<root>") : path_) +
                          "' must be an object");
    }
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    out = convert<T>(*it, key);
  }

  template <typename T>
  void read_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
    } else {
      out = convert<T>(*it, key);
    }
  }

  template <typename T, typename Parse>
  void read_enum(const char* key, T& out, Parse parse) {
    std::string name;
    bool present = j_.contains(key);
    read(key, name);
    if (!present) return;
    try {
      out = parse(name);
    } catch (const Error& e) {
      throw ArgumentError("config: '" + full(key) + "': " + e.what());
    }
  }

  template <typename F>
  void section(const char* key, F&& f) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    ConfigReader child(*it, full(key));
    f(child);
    child.finish();
  }

  const Json* raw(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string full(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ArgumentError("config: unknown key '" + full(it.key()) + "'");
    }
  }

 private:
  template <typename T>
  T convert(const Json& v, const char* key) const {
    bool ok = false;
    if constexpr (std::is_same_v<T, bool>) {
      ok = v.is_boolean();
    } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      ok = v.is_number_unsigned();
    } else if constexpr (std::is_floating_point_v<T>) {
      ok = v.is_number();
    } else if constexpr (std::is_same_v<T, std::string>) {
      ok = v.is_string();
    } else {
      ok = true;
    }
    if (ok) {
      try {
        return v.get<T>();
      } catch (const nlohmann::json::exception&) {
        ok = false;
      }
    }
    throw ArgumentError("config: '" + full(key) + "' has the wrong type (" + v.dump() + ")");
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string shortest(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t count_positive(const Labels& y) {
  std::size_t n = 0;
  for (auto v : y) n += v ? 1 : 0;
  return n;
}

ProfitConstraints make_constraints(const EconomicsConfig& e) {
  if (e.constraints == "non-negative") return ProfitConstraints::non_negative();
  if (e.constraints == "holding-only") return ProfitConstraints::holding_only();
  if (e.constraints == "box") return ProfitConstraints::box(e.lower, e.upper);
  throw ArgumentError("unknown economics constraint set '" + e.constraints +
                      "' (expected non-negative, holding-only or box)");
}

EnsembleConfig ensemble_config(const RunConfig& c) {
  EnsembleConfig e;
  e.n_estimators = c.model.n_estimators;
  e.max_features = c.model.max_features;
  e.bootstrap = c.model.bootstrap;
  e.bootstrap_features = c.model.bootstrap_features;
  e.max_depth = c.model.max_depth;
  e.min_leaf = c.model.min_leaf;
  e.split_features = c.model.split_features;
  e.seed = stream_seed(c, kEnsembleStream);
  e.threads = c.threads;
  return e;
}

DataTable load_data(const RunConfig& c, LoadReport* report) {
  if (c.data.source == "synthetic") {
    SyntheticOptions opts = c.data.synthetic;
    opts.seed = c.seed;
    DataTable t = generate_synthetic(opts);
    if (report) report->rows_read = t.row_count();
    return t;
  }
  if (c.data.source == "csv") {
    if (c.data.path.empty()) throw ArgumentError("data.path is required for csv input");
    return load_csv(c.data.path, inventory_schema(), report);
  }
  throw ArgumentError("unknown data source '" + c.data.source + "' (expected synthetic or csv)");
}

Json load_report_json(const LoadReport& l) {
  return Json{{"rows_read", l.rows_read},
              {"rows_dropped_missing_target", l.rows_dropped_missing_target},
              {"sentinel_cells", l.sentinel_cells},
              {"sku_dropped", l.sku_dropped}};
}

std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
  return std::filesystem::path(c.output_dir) / name;
}

Json row_json(const ModelRow& r) {
  Json j{{"label", r.label}, {"model", r.model}, {"transform", r.transform},
         {"resampling", r.resampling}, {"ok", r.ok}};
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  j["metrics"] = serialize(r.metrics);
  j["tuned_threshold"] = serialize(r.tuned);
  j["economics"] = Json{{"optimal_profit", serialize(r.profit)},
                        {"misclassification_cost", serialize(r.cost)}};
  return j;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& labels,
                      const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "attribute";
  for (const auto& l : labels) out << ',' << csv_field(l);
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << csv_field(labels[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << shortest(m(r, c));
    out << '\n';
  }
}

}  // namespace

const char* version_string() { return BACKORDER_VERSION; }

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDummy:
      return "dummy";
    case ModelKind::kBbc:
      return "bbc";
    case ModelKind::kVaeBbc:
      return "vae_bbc";
    case ModelKind::kRandomForest:
      return "random_forest";
    case ModelKind::kMlp:
      break;
  }
  return "mlp";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "dummy") return ModelKind::kDummy;
  if (name == "bbc") return ModelKind::kBbc;
  if (name == "vae_bbc") return ModelKind::kVaeBbc;
  if (name == "random_forest") return ModelKind::kRandomForest;
  if (name == "mlp") return ModelKind::kMlp;
  throw ArgumentError("unknown model '" + name +
                      "' (expected dummy, bbc, vae_bbc, random_forest or mlp)");
}

std::string to_string(Resampling r) {
  switch (r) {
    case Resampling::kNone:
      return "none";
    case Resampling::kSmote:
      return "smote";
    case Resampling::kBalancedBaggingInternal:
      break;
  }
  return "balanced-bagging-internal";
}

Resampling parse_resampling(const std::string& name) {
  if (name == "none") return Resampling::kNone;
  if (name == "smote") return Resampling::kSmote;
  if (name == "balanced-bagging-internal") return Resampling::kBalancedBaggingInternal;
  throw ArgumentError("unknown resampling '" + name +
                      "' (expected none, smote or balanced-bagging-internal)");
}

std::string to_string(GridMode g) {
  switch (g) {
    case GridMode::kNone:
      return "none";
    case GridMode::kDesk:
      return "desk";
    case GridMode::kFull:
      break;
  }
  return "full";
}

GridMode parse_grid_mode(const std::string& name) {
  if (name == "none") return GridMode::kNone;
  if (name == "desk") return GridMode::kDesk;
  if (name == "full") return GridMode::kFull;
  throw ArgumentError("unknown grid mode '" + name + "' (expected none, desk or full)");
}

RunConfig parse_run_config(const Json& j, const std::string& origin) {
  RunConfig c;
  c.origin = origin;
  ConfigReader root(j, "");
  root.section("data", [&](ConfigReader& r) {
    r.read("source", c.data.source);
    r.read("path", c.data.path);
    r.section("synthetic", [&](ConfigReader& s) {
      s.read("rows", c.data.synthetic.n_rows);
      s.read("positive_rate", c.data.synthetic.positive_rate);
      s.read("informative", c.data.synthetic.n_informative);
      s.read("signal", c.data.synthetic.signal);
      s.read("missing_rate", c.data.synthetic.missing_rate);
    });
  });
  root.section("split", [&](ConfigReader& r) {
    r.read("train_fraction", c.split.train_fraction);
    r.read("stratify", c.split.stratify);
  });
  root.section("imputer", [&](ConfigReader& r) {
    r.read("max_rounds", c.imputer.max_rounds);
    r.read("tol", c.imputer.tol);
    r.read("ridge", c.imputer.ridge);
  });
  root.read_enum("transform", c.transform,
                 [](const std::string& s) { return parse_transform_kind(s); });
  root.read_enum("resampling", c.resampling, parse_resampling);
  root.section("smote", [&](ConfigReader& r) {
    r.read("k", c.smote.k);
    r.read("ratio", c.smote.ratio);
  });
  root.section("model", [&](ConfigReader& r) {
    auto& m = c.model;
    r.read_enum("kind", m.kind, parse_model_kind);
    r.read("n_estimators", m.n_estimators);
    r.read("max_features", m.max_features);
    r.read("bootstrap", m.bootstrap);
    r.read("bootstrap_features", m.bootstrap_features);
    r.read_optional("max_depth", m.max_depth);
    r.read("min_leaf", m.min_leaf);
    r.read_optional("split_features", m.split_features);
    r.read_enum("grid", m.grid, parse_grid_mode);
    r.read("cv_folds", m.cv_folds);
    r.read_enum("dummy_mode", m.dummy_mode, parse_dummy_mode);
    r.read_optional("class_weight", m.class_weight);
    r.section("vae", [&](ConfigReader& v) {
      v.read("latent_dim", m.vae.latent_dim);
      v.read("hidden", m.vae.hidden);
      v.read("epochs", m.vae.epochs);
      v.read("batch_size", m.vae.batch_size);
      v.read("learning_rate", m.vae.learning_rate);
      v.read("gradient_check", m.vae.gradient_check);
    });
    r.section("mlp", [&](ConfigReader& v) {
      v.read("hidden_sizes", m.mlp.hidden_sizes);
      v.read("epochs", m.mlp.epochs);
      v.read("batch_size", m.mlp.batch_size);
      v.read("learning_rate", m.mlp.learning_rate);
      v.read("gradient_check", m.mlp.gradient_check);
    });
  });
  root.section("evaluation", [&](ConfigReader& r) {
    auto& e = c.evaluation;
    r.read("threshold", e.threshold);
    r.read_enum("threshold_objective", e.objective, parse_threshold_objective);
    r.read("fp_cost", e.fp_cost);
    r.read("fn_cost", e.fn_cost);
    r.read("importance", e.importance);
    r.read("importance_repeats", e.importance_repeats);
    r.read_enum("importance_metric", e.importance_metric, parse_importance_metric);
    r.read("screening", e.screening);
  });
  root.section("economics", [&](ConfigReader& r) {
    r.read("constraints", c.economics.constraints);
    r.read("lower", c.economics.lower);
    r.read("upper", c.economics.upper);
    r.read("indicator", c.economics.indicator);
  });
  root.section("matrix", [&](ConfigReader& r) {
    std::vector<std::string> models, transforms;
    bool has_models = false, has_transforms = false;
    if (const Json* m = r.raw("models")) {
      has_models = true;
      if (!m->is_array()) throw ArgumentError("config: 'matrix.models' must be an array");
      for (const auto& v : *m) models.push_back(v.get<std::string>());
    }
    if (const Json* t = r.raw("transforms")) {
      has_transforms = true;
      if (!t->is_array()) throw ArgumentError("config: 'matrix.transforms' must be an array");
      for (const auto& v : *t) transforms.push_back(v.get<std::string>());
    }
    if (has_models) {
      c.matrix.models.clear();
      for (const auto& m : models) c.matrix.models.push_back(parse_model_kind(m));
    }
    if (has_transforms) {
      c.matrix.transforms.clear();
      for (const auto& t : transforms) c.matrix.transforms.push_back(parse_transform_kind(t));
    }
  });
  root.read("seed", c.seed);
  root.read("threads", c.threads);
  root.read("output_dir", c.output_dir);
  root.read("label", c.label);
  root.finish();

  if (!(c.split.train_fraction > 0.0 && c.split.train_fraction < 1.0)) {
    throw ArgumentError("config: 'split.train_fraction' must lie in (0, 1)");
  }
  if (!(c.evaluation.threshold >= 0.0 && c.evaluation.threshold <= 1.0)) {
    throw ArgumentError("config: 'evaluation.threshold' must lie in [0, 1]");
  }
  if (c.economics.indicator != "predicted" && c.economics.indicator != "actual") {
    throw ArgumentError("config: 'economics.indicator' must be predicted or actual");
  }
  make_constraints(c.economics);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = read_json(path);
  } catch (const Error& e) {
    throw StageError("config", path.string(), e.what());
  }
  try {
    return parse_run_config(j, path.string());
  } catch (const Error& e) {
    throw StageError("config", path.string(), e.what());
  }
}

Json serialize(const RunConfig& c) {
  Json models = Json::array(), transforms = Json::array();
  for (auto m : c.matrix.models) models.push_back(to_string(m));
  for (auto t : c.matrix.transforms) transforms.push_back(std::string(to_string(t)));
  const auto& m = c.model;
  return Json{
      {"data",
       {{"source", c.data.source},
        {"path", c.data.path},
        {"synthetic",
         {{"rows", c.data.synthetic.n_rows},
          {"positive_rate", c.data.synthetic.positive_rate},
          {"informative", c.data.synthetic.n_informative},
          {"signal", c.data.synthetic.signal},
          {"missing_rate", c.data.synthetic.missing_rate}}}}},
      {"split", {{"train_fraction", c.split.train_fraction}, {"stratify", c.split.stratify}}},
      {"imputer",
       {{"max_rounds", c.imputer.max_rounds}, {"tol", c.imputer.tol}, {"ridge", c.imputer.ridge}}},
      {"transform", std::string(to_string(c.transform))},
      {"resampling", to_string(c.resampling)},
      {"smote", {{"k", c.smote.k}, {"ratio", c.smote.ratio}}},
      {"model",
       {{"kind", to_string(m.kind)},
        {"n_estimators", m.n_estimators},
        {"max_features", m.max_features},
        {"bootstrap", m.bootstrap},
        {"bootstrap_features", m.bootstrap_features},
        {"max_depth", m.max_depth ? Json(*m.max_depth) : Json(nullptr)},
        {"min_leaf", m.min_leaf},
        {"split_features", m.split_features ? Json(*m.split_features) : Json(nullptr)},
        {"grid", to_string(m.grid)},
        {"cv_folds", m.cv_folds},
        {"dummy_mode", to_string(m.dummy_mode)},
        {"class_weight", m.class_weight ? Json(*m.class_weight) : Json(nullptr)},
        {"vae",
         {{"latent_dim", m.vae.latent_dim},
          {"hidden", m.vae.hidden},
          {"epochs", m.vae.epochs},
          {"batch_size", m.vae.batch_size},
          {"learning_rate", m.vae.learning_rate},
          {"gradient_check", m.vae.gradient_check}}},
        {"mlp",
         {{"hidden_sizes", m.mlp.hidden_sizes},
          {"epochs", m.mlp.epochs},
          {"batch_size", m.mlp.batch_size},
          {"learning_rate", m.mlp.learning_rate},
          {"gradient_check", m.mlp.gradient_check}}}}},
      {"evaluation",
       {{"threshold", c.evaluation.threshold},
        {"threshold_objective", to_string(c.evaluation.objective)},
        {"fp_cost", c.evaluation.fp_cost},
        {"fn_cost", c.evaluation.fn_cost},
        {"importance", c.evaluation.importance},
        {"importance_repeats", c.evaluation.importance_repeats},
        {"importance_metric", to_string(c.evaluation.importance_metric)},
        {"screening", c.evaluation.screening}}},
      {"economics",
       {{"constraints", c.economics.constraints},
        {"lower", c.economics.lower},
        {"upper", c.economics.upper},
        {"indicator", c.economics.indicator}}},
      {"matrix", {{"models", models}, {"transforms", transforms}}},
      {"seed", c.seed},
      {"threads", c.threads},
      {"output_dir", c.output_dir},
      {"label", c.label}};
}

void apply_environment(RunConfig& c) {
  if (const char* out = std::getenv("BACKORDER_OUT_DIR"); out && *out) c.output_dir = out;
  if (const char* t = std::getenv("BACKORDER_THREADS"); t && *t) {
    std::size_t value = 0;
    const std::string s(t);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ArgumentError("BACKORDER_THREADS must be a non-negative integer, got '" + s + "'");
    }
    c.threads = value;
  }
}

std::string config_hash(const RunConfig& c) {
  Json j = serialize(c);
  j.erase("threads");
  j.erase("output_dir");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string row_label(const RunConfig& c) {
  if (!c.label.empty()) return c.label;
  return to_string(c.model.kind) + "/" + std::string(to_string(c.transform));
}

PreparedData prepare_data(const RunConfig& c) {
  PreparedData d;
  d.raw = in_stage("load", c, [&] { return load_data(c, &d.load); });
  d.split = in_stage("split", c, [&] {
    return split(d.raw, c.split.train_fraction, c.seed, c.split.stratify);
  });
  in_stage("impute", c, [&] {
    d.imputer = fit_iterative_imputer(d.raw, d.split.train, c.imputer);
    d.imputed = impute(d.imputer, d.raw);
  });
  in_stage("transform", c, [&] {
    const auto numeric = d.imputed.numeric_columns();
    d.transform = fit_transform(c.transform, d.imputed, d.split.train, numeric);
    d.transformed = apply_transform(d.transform, d.imputed);
  });
  return d;
}

FittedModel fit_model(const RunConfig& c, const PreparedData& data) {
  FittedModel out;
  ModelBundle& b = out.bundle;
  b.model_kind = to_string(c.model.kind);
  b.imputer = data.imputer;
  b.transform = data.transform;

  const DataTable* train_table = &data.transformed;
  RowIndices rows = data.split.train;
  std::optional<SmoteResult> resampled;
  if (c.resampling == Resampling::kSmote) {
    in_stage("resample", c, [&] {
      resampled = smote(data.transformed, data.split.train, c.smote.k, c.smote.ratio,
                        stream_seed(c, kSmoteStream));
    });
    train_table = &resampled->table;
    rows = all_rows(resampled->table);
    out.smote_synthetic = resampled->synthetic.size();
  }

  in_stage("train", c, [&] {
    const auto features = train_table->feature_columns();
    b.input_columns = train_table->column_names(features);
    FeatureMatrix x = to_matrix(*train_table, rows, features);
    const Labels y = train_table->labels(rows);
    EnsembleConfig ec = ensemble_config(c);

    auto fit_bbc = [&](const FeatureMatrix& features_x) {
      if (c.model.grid != GridMode::kNone) {
        const auto grid =
            c.model.grid == GridMode::kFull ? ParameterGrid::full() : ParameterGrid::desk();
        out.grid = grid_search_cv(features_x, y, grid, ec, c.model.cv_folds,
                                  stream_seed(c, kGridStream), c.threads);
        ec = out.grid->best;
        ec.threads = c.threads;
      }
      auto model = fit_balanced_bagging(features_x, y, ec);
      model.feature_names = b.feature_names();
      return model;
    };

    switch (c.model.kind) {
      case ModelKind::kDummy:
        b.model = DummyClassifier(c.model.dummy_mode, static_cast<std::size_t>(x.cols()),
                                  stream_seed(c, kDummyStream));
        break;
      case ModelKind::kBbc:
        b.model = fit_bbc(x);
        break;
      case ModelKind::kVaeBbc: {
        VaeOptions vo = c.model.vae;
        vo.seed = stream_seed(c, kVaeStream);
        auto vae = train_vae(x, vo);
        out.train_report = vae.report;
        b.vae = std::move(vae.model);
        b.model = fit_bbc(encode_and_augment(*b.vae, x));
        break;
      }
      case ModelKind::kRandomForest: {
        auto model = fit_random_forest(x, y, ec);
        model.feature_names = b.feature_names();
        b.model = std::move(model);
        break;
      }
      case ModelKind::kMlp: {
        MlpOptions mo = c.model.mlp;
        mo.seed = stream_seed(c, kMlpStream);
        const std::size_t pos = count_positive(y);
        if (pos == 0 || pos == y.size()) throw DataError("MLP training rows contain one class");
        mo.class_weight = c.model.class_weight.value_or(static_cast<double>(y.size() - pos) /
                                                        static_cast<double>(pos));
        auto mlp = train_mlp_classifier(x, y, mo);
        out.train_report = mlp.report;
        b.model = std::move(mlp.model);
        break;
      }
    }
  });
  return out;
}

ModelRow score_model(const RunConfig& c, const PreparedData& data, const ModelBundle& bundle,
                     std::vector<double>* scores) {
  ModelRow row;
  row.label = row_label(c);
  row.model = bundle.model_kind;
  row.transform = std::string(to_string(c.transform));
  row.resampling = to_string(c.resampling);
  const auto& test = data.split.test;
  const Labels y = data.raw.labels(test);
  std::vector<double> p;
  in_stage("evaluate", c, [&] {
    p = bundle.predict_proba(data.raw, test);
    row.metrics = evaluate_scores(y, p, c.evaluation.threshold);
    row.tuned = optimize_threshold(y, p, c.evaluation.objective, c.evaluation.fp_cost,
                                   c.evaluation.fn_cost);
  });
  in_stage("economics", c, [&] {
    Labels indicator;
    if (c.economics.indicator == "actual") {
      indicator = y;
    } else {
      indicator.resize(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) indicator[i] = p[i] >= c.evaluation.threshold;
    }
    row.profit = maximize_profit(bundle.imputed(data.raw), test, indicator, CostParams{},
                                 make_constraints(c.economics));
    row.cost = misclassification_cost(row.metrics.confusion, c.evaluation.fp_cost,
                                      c.evaluation.fn_cost);
  });
  if (scores) *scores = std::move(p);
  return row;
}

Json serialize(const ExperimentReport& r) {
  Json models = Json::array();
  for (const auto& m : r.models) models.push_back(row_json(m));
  Json j{{"config_hash", r.config_hash},
         {"seed", r.seed},
         {"data",
          {{"rows", r.rows},
           {"train_rows", r.train_rows},
           {"test_rows", r.test_rows},
           {"train_positives", r.train_positives},
           {"test_positives", r.test_positives},
           {"load", load_report_json(r.load)}}},
         {"imputer", {{"rounds", r.imputer_rounds}, {"converged", r.imputer_converged}}},
         {"smote_synthetic", r.smote_synthetic},
         {"models", models}};
  if (r.train_report) j["training"] = serialize(*r.train_report);
  if (r.grid) j["grid_search"] = serialize(*r.grid);
  if (r.importance) j["importance"] = serialize(*r.importance);
  if (!r.screening.empty()) j["screening"] = serialize(r.screening);
  return j;
}

void write_comparison_csv(const std::vector<ModelRow>& rows, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "label,model,transform,resampling,roc_auc,pr_auc,macro_f1,precision,recall,mcc,brier,"
         "tp,fp,fn,tn,optimal_profit,misclassification_cost,status\n";
  for (const auto& r : rows) {
    out << csv_field(r.label) << ',' << r.model << ',' << r.transform << ',' << r.resampling;
    if (r.ok) {
      const auto& m = r.metrics;
      out << ',' << fixed4(m.roc_auc) << ',' << fixed4(m.pr_auc) << ',' << fixed4(m.macro_f1)
          << ',' << fixed4(m.precision) << ',' << fixed4(m.recall) << ',' << fixed4(m.mcc)
          << ',' << fixed4(m.brier) << ',' << m.confusion.tp << ',' << m.confusion.fp << ','
          << m.confusion.fn << ',' << m.confusion.tn << ',' << fixed4(r.profit.profit) << ','
          << fixed4(r.cost.total) << ",ok\n";
    } else {
      out << ",,,,,,,,,,,,,," << csv_field("error: " + r.error) << '\n';
    }
  }
}

void write_importance_csv(const ImportanceReport& r, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "feature,mean_drop,std_dev,repeats\n";
  for (const auto& f : r.ranked()) {
    out << csv_field(f.feature) << ',' << shortest(f.mean_drop) << ',' << shortest(f.std_dev)
        << ',' << f.drops.size() << '\n';
  }
}

void write_screening_csv(const std::vector<ScreeningRow>& rows,
                         const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "attribute,test,statistic,p_value,n1,n2\n";
  for (const auto& r : rows) {
    out << csv_field(r.attribute) << ',' << to_string(r.result.method) << ','
        << shortest(r.result.statistic) << ',' << shortest(r.result.p_value) << ','
        << r.result.n1 << ',' << r.result.n2 << '\n';
  }
}

void write_curve_csv(const std::vector<CurvePoint>& points, const std::string& x_name,
                     const std::string& y_name, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "threshold," << x_name << ',' << y_name << '\n';
  for (const auto& p : points) {
    out << shortest(p.threshold) << ',' << shortest(p.x) << ',' << shortest(p.y) << '\n';
  }
}

ExperimentResult run_experiment(const RunConfig& c, bool write_outputs) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  const PreparedData data = prepare_data(c);
  FittedModel fitted = fit_model(c, data);

  ExperimentResult result;
  ExperimentReport& r = result.report;
  r.config_hash = config_hash(c);
  r.seed = c.seed;
  r.rows = data.raw.row_count();
  r.train_rows = data.split.train.size();
  r.test_rows = data.split.test.size();
  r.train_positives = count_positive(data.raw.labels(data.split.train));
  r.test_positives = count_positive(data.raw.labels(data.split.test));
  r.load = data.load;
  r.imputer_rounds = data.imputer.rounds;
  r.imputer_converged = data.imputer.converged;
  r.smote_synthetic = fitted.smote_synthetic;
  r.train_report = fitted.train_report;
  r.grid = fitted.grid;
  r.models.push_back(score_model(c, data, fitted.bundle, &result.test_scores));
  result.test_labels = data.raw.labels(data.split.test);

  if (c.evaluation.importance) {
    r.importance = in_stage("importance", c, [&] {
      ImportanceOptions opts;
      opts.metric = c.evaluation.importance_metric;
      opts.repeats = c.evaluation.importance_repeats;
      opts.seed = stream_seed(c, kImportanceStream);
      opts.threads = c.threads;
      const auto names = fitted.bundle.feature_names();
      return permutation_importance(fitted.bundle.classifier(),
                                    fitted.bundle.features(data.raw, data.split.test),
                                    result.test_labels, names, opts);
    });
  }
  if (c.evaluation.screening) {
    r.screening = in_stage("screen", c, [&] {
      return screen_attributes(data.raw, all_rows(data.raw));
    });
  }

  if (write_outputs) {
    in_stage("write", c, [&] {
      write_json(serialize(r), out_path(c, "report.json"));
      write_json(serialize(c), out_path(c, "config.json"));
      write_comparison_csv(r.models, out_path(c, "metrics.csv"));
      write_curve_csv(roc_curve(result.test_labels, result.test_scores), "fpr", "tpr",
                      out_path(c, "roc_curve.csv"));
      write_curve_csv(pr_curve(result.test_labels, result.test_scores), "recall", "precision",
                      out_path(c, "pr_curve.csv"));
      if (r.importance) write_importance_csv(*r.importance, out_path(c, "importance.csv"));
      if (!r.screening.empty()) write_screening_csv(r.screening, out_path(c, "screening.csv"));
      save_bundle(fitted.bundle, out_path(c, "model.json"));
      const auto finished = std::chrono::system_clock::now();
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      write_json(Json{{"config_hash", r.config_hash},
                      {"config_origin", c.origin},
                      {"seed", c.seed},
                      {"threads", resolve_threads(c.threads)},
                      {"version", version_string()},
                      {"started_utc", utc_timestamp(started)},
                      {"finished_utc", utc_timestamp(finished)},
                      {"elapsed_seconds", elapsed}},
                 out_path(c, "provenance.json"));
    });
  }
  result.bundle = std::move(fitted.bundle);
  return result;
}

std::vector<RunConfig> expand_matrix(const RunConfig& c) {
  if (c.matrix.models.empty() || c.matrix.transforms.empty()) {
    throw ArgumentError("model matrix needs at least one model and one transform");
  }
  std::vector<RunConfig> out;
  for (auto model : c.matrix.models) {
    for (auto transform : c.matrix.transforms) {
      RunConfig rc = c;
      rc.model.kind = model;
      rc.transform = transform;
      rc.label.clear();
      rc.evaluation.importance = false;
      rc.evaluation.screening = false;
      out.push_back(std::move(rc));
    }
  }
  return out;
}

ExperimentReport run_model_matrix(const std::vector<RunConfig>& configs, std::size_t threads) {
  if (configs.empty()) throw ArgumentError("model matrix needs at least one config");

  // Preprocessing is shared by configs that differ only in the model.
  std::map<std::string, std::size_t> key_index;
  std::vector<std::size_t> data_of(configs.size());
  std::vector<const RunConfig*> data_configs;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    Json j = serialize(configs[i]);
    const std::string key = Json{{"data", j["data"]}, {"split", j["split"]},
                                 {"imputer", j["imputer"]}, {"transform", j["transform"]},
                                 {"seed", j["seed"]}}.dump();
    const auto [it, inserted] = key_index.emplace(key, data_configs.size());
    if (inserted) data_configs.push_back(&configs[i]);
    data_of[i] = it->second;
  }
  std::vector<std::optional<PreparedData>> prepared(data_configs.size());
  std::vector<std::string> prepare_errors(data_configs.size());
  parallel_for(data_configs.size(), threads, [&](std::size_t k) {
    try {
      prepared[k] = prepare_data(*data_configs[k]);
    } catch (const std::exception& e) {
      prepare_errors[k] = e.what();
    }
  });

  const bool outer_parallel = resolve_threads(threads) > 1;
  std::vector<ModelRow> rows(configs.size());
  parallel_for(configs.size(), threads, [&](std::size_t i) {
    RunConfig rc = configs[i];
    if (outer_parallel) rc.threads = 1;
    const auto k = data_of[i];
    try {
      if (!prepared[k]) throw Error(prepare_errors[k]);
      const auto fitted = fit_model(rc, *prepared[k]);
      rows[i] = score_model(rc, *prepared[k], fitted.bundle);
    } catch (const std::exception& e) {
      rows[i] = ModelRow{};
      rows[i].label = row_label(rc);
      rows[i].model = to_string(rc.model.kind);
      rows[i].transform = std::string(to_string(rc.transform));
      rows[i].resampling = to_string(rc.resampling);
      rows[i].ok = false;
      rows[i].error = e.what();
    }
  });

  ExperimentReport report;
  std::string hashes;
  for (const auto& c : configs) hashes += config_hash(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : hashes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  report.config_hash = buf;
  report.seed = configs.front().seed;
  if (prepared[0]) {
    const auto& d = *prepared[0];
    report.rows = d.raw.row_count();
    report.train_rows = d.split.train.size();
    report.test_rows = d.split.test.size();
    report.train_positives = count_positive(d.raw.labels(d.split.train));
    report.test_positives = count_positive(d.raw.labels(d.split.test));
    report.load = d.load;
    report.imputer_rounds = d.imputer.rounds;
    report.imputer_converged = d.imputer.converged;
  }
  report.models = std::move(rows);
  return report;
}

Json run_prepare(const RunConfig& c) {
  const auto d = prepare_data(c);
  in_stage("write", c, [&] {
    write_csv(d.transformed.select_rows(d.split.train), out_path(c, "train.csv"));
    write_csv(d.transformed.select_rows(d.split.test), out_path(c, "test.csv"));
    write_json(Json{{"seed", d.split.seed}, {"train", d.split.train}, {"test", d.split.test}},
               out_path(c, "split.json"));
    write_json(Json{{"imputer", serialize(d.imputer)}, {"transform", serialize(d.transform)}},
               out_path(c, "preprocessing.json"));
  });
  return Json{{"rows", d.raw.row_count()},
              {"train_rows", d.split.train.size()},
              {"test_rows", d.split.test.size()},
              {"missing_cells", d.raw.missing_count()},
              {"imputer_rounds", d.imputer.rounds},
              {"imputer_converged", d.imputer.converged},
              {"load", load_report_json(d.load)}};
}

Json run_screen(const RunConfig& c) {
  LoadReport load;
  const DataTable raw = in_stage("load", c, [&] { return load_data(c, &load); });
  in_stage("screen", c, [&] {
    const auto rows = all_rows(raw);
    const auto screening = screen_attributes(raw, rows);
    write_json(serialize(screening), out_path(c, "screening.json"));
    write_screening_csv(screening, out_path(c, "screening.csv"));
    const auto numeric = raw.numeric_columns();
    const auto corr = spearman_matrix(raw, numeric, c.threads);
    write_matrix_csv(corr.values, corr.labels, out_path(c, "spearman.csv"));
    std::vector<std::size_t> flags;
    for (std::size_t k = 0; k < raw.column_count(); ++k) {
      if (raw.schema()[k].kind != ColumnKind::kNumeric) flags.push_back(k);
    }
    const auto chi = chi_square_matrix(raw, flags, rows);
    write_matrix_csv(chi.statistic, chi.labels, out_path(c, "chi_square.csv"));
    write_matrix_csv(chi.p_value, chi.labels, out_path(c, "chi_square_p.csv"));
  });
  return Json{{"rows", raw.row_count()}, {"attributes", raw.feature_columns().size()}};
}

Json run_train(const RunConfig& c) {
  const auto d = prepare_data(c);
  const auto fitted = fit_model(c, d);
  in_stage("write", c, [&] {
    save_bundle(fitted.bundle, out_path(c, "model.json"));
    Json training{{"model", fitted.bundle.model_kind},
                  {"config_hash", config_hash(c)},
                  {"smote_synthetic", fitted.smote_synthetic}};
    if (fitted.train_report) training["training"] = serialize(*fitted.train_report);
    if (fitted.grid) training["grid_search"] = serialize(*fitted.grid);
    write_json(training, out_path(c, "training.json"));
  });
  return Json{{"model", fitted.bundle.model_kind},
              {"path", out_path(c, "model.json").string()}};
}

namespace {

ModelBundle load_model(const RunConfig& c, const std::filesystem::path& path) {
  return in_stage("load-model", c, [&] { return load_bundle(path); });
}

}  // namespace

Json run_evaluate(const RunConfig& c, const std::filesystem::path& model_path) {
  const auto bundle = load_model(c, model_path);
  const auto d = prepare_data(c);
  std::vector<double> scores;
  const auto row = score_model(c, d, bundle, &scores);
  in_stage("write", c, [&] {
    const auto y = d.raw.labels(d.split.test);
    write_json(row_json(row), out_path(c, "metrics.json"));
    write_comparison_csv({row}, out_path(c, "metrics.csv"));
    write_curve_csv(roc_curve(y, scores), "fpr", "tpr", out_path(c, "roc_curve.csv"));
    write_curve_csv(pr_curve(y, scores), "recall", "precision", out_path(c, "pr_curve.csv"));
  });
  return Json{{"roc_auc", row.metrics.roc_auc},
              {"pr_auc", row.metrics.pr_auc},
              {"recall", row.metrics.recall}};
}

Json run_importance(const RunConfig& c, const std::filesystem::path& model_path) {
  const auto bundle = load_model(c, model_path);
  const auto d = prepare_data(c);
  const auto report = in_stage("importance", c, [&] {
    ImportanceOptions opts;
    opts.metric = c.evaluation.importance_metric;
    opts.repeats = c.evaluation.importance_repeats;
    opts.seed = stream_seed(c, kImportanceStream);
    opts.threads = c.threads;
    const auto names = bundle.feature_names();
    return permutation_importance(bundle.classifier(), bundle.features(d.raw, d.split.test),
                                  d.raw.labels(d.split.test), names, opts);
  });
  in_stage("write", c, [&] {
    write_json(serialize(report), out_path(c, "importance.json"));
    write_importance_csv(report, out_path(c, "importance.csv"));
  });
  const auto ranked = report.ranked();
  return Json{{"baseline", report.baseline},
              {"top_feature", ranked.empty() ? std::string() : ranked.front().feature}};
}

Json run_economics(const RunConfig& c, const std::filesystem::path& model_path) {
  const auto bundle = load_model(c, model_path);
  const auto d = prepare_data(c);
  const auto row = score_model(c, d, bundle);
  in_stage("write", c, [&] {
    write_json(Json{{"classifier", row.label},
                    {"optimal_profit", serialize(row.profit)},
                    {"misclassification_cost", serialize(row.cost)}},
               out_path(c, "economics.json"));
    auto out = open_output(out_path(c, "economics.csv"));
    out << "classifier,optimal_profit,misclassification_cost\n";
    out << csv_field(row.label) << ',' << fixed4(row.profit.profit) << ','
        << fixed4(row.cost.total) << '\n';
  });
  return Json{{"optimal_profit", row.profit.profit},
              {"misclassification_cost", row.cost.total}};
}

Json run_synth(const RunConfig& c) {
  const auto table = in_stage("synth", c, [&] {
    SyntheticOptions opts = c.data.synthetic;
    opts.seed = c.seed;
    return generate_synthetic(opts);
  });
  in_stage("write", c, [&] { write_csv(table, out_path(c, "synthetic.csv")); });
  return Json{{"rows", table.row_count()},
              {"positives", count_positive(table.labels())},
              {"path", out_path(c, "synthetic.csv").string()}};
}

Json run_matrix(const RunConfig& c) {
  const auto configs = expand_matrix(c);
  const auto report = run_model_matrix(configs, c.threads);
  in_stage("write", c, [&] {
    write_json(serialize(report), out_path(c, "matrix.json"));
    write_comparison_csv(report.models, out_path(c, "matrix.csv"));
  });
  std::size_t failed = 0;
  for (const auto& r : report.models) failed += r.ok ? 0 : 1;
  return Json{{"rows", report.models.size()}, {"failed", failed}};
}

}  // namespace backorder
