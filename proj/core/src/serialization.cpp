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

#include "backorder/serialization.hpp"

#include <fstream>

#include "backorder/error.hpp"

namespace backorder {
namespace {

Json vector_json(const Eigen::VectorXd& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Json layer_json(const DenseLayer& l) {
  return Json{{"activation", to_string(l.activation)},
              {"weights", serialize(l.weights)},
              {"biases", vector_json(l.biases)}};
}

DenseLayer layer_from_json(const Json& j) {
  DenseLayer l;
  l.activation = parse_activation(j.at("activation").get<std::string>());
  l.weights = matrix_from_json(j.at("weights"));
  l.biases = vector_from_json(j.at("biases"));
  if (l.biases.size() != l.weights.rows()) throw ParseError("layer bias/weight shape mismatch");
  return l;
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

}  // namespace

Json serialize(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    throw ParseError("matrix shape does not match its data");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

Json serialize(const FittedTransform& t) {
  Json cols = Json::array();
  for (const auto& c : t.columns) {
    cols.push_back(Json{{"column", c.column},
                        {"center", c.center},
                        {"scale", c.scale},
                        {"degenerate", c.degenerate},
                        {"log_applied", c.log_applied},
                        {"quantiles", c.quantiles},
                        {"references", c.references}});
  }
  return Json{{"kind", std::string(to_string(t.kind))}, {"columns", cols}};
}

FittedTransform transform_from_json(const Json& j) {
  FittedTransform t;
  t.kind = parse_transform_kind(j.at("kind").get<std::string>());
  for (const auto& c : j.at("columns")) {
    ColumnTransform ct;
    ct.column = c.at("column").get<std::string>();
    ct.center = c.at("center").get<double>();
    ct.scale = c.at("scale").get<double>();
    ct.degenerate = c.at("degenerate").get<bool>();
    ct.log_applied = c.at("log_applied").get<bool>();
    ct.quantiles = c.at("quantiles").get<std::vector<double>>();
    ct.references = c.at("references").get<std::vector<double>>();
    t.columns.push_back(std::move(ct));
  }
  return t;
}

Json serialize(const ImputerModel& m) {
  Json regs = Json::array();
  for (const auto& r : m.regressions) {
    regs.push_back(Json{{"column", r.column},
                        {"predictors", r.predictors},
                        {"coefficients", r.coefficients},
                        {"intercept", r.intercept}});
  }
  return Json{{"columns", m.columns},
              {"means", m.means},
              {"lower", m.lower},
              {"upper", m.upper},
              {"regressions", regs},
              {"max_rounds", m.max_rounds},
              {"tol", m.tol},
              {"ridge", m.ridge},
              {"rounds", m.rounds},
              {"converged", m.converged},
              {"round_max_change", m.round_max_change},
              {"contraction_ok", m.contraction_ok}};
}

ImputerModel imputer_from_json(const Json& j) {
  ImputerModel m;
  m.columns = j.at("columns").get<std::vector<std::string>>();
  m.means = j.at("means").get<std::vector<double>>();
  m.lower = j.at("lower").get<std::vector<double>>();
  m.upper = j.at("upper").get<std::vector<double>>();
  for (const auto& r : j.at("regressions")) {
    ColumnRegression reg;
    reg.column = r.at("column").get<std::string>();
    reg.predictors = r.at("predictors").get<std::vector<std::string>>();
    reg.coefficients = r.at("coefficients").get<std::vector<double>>();
    reg.intercept = r.at("intercept").get<double>();
    m.regressions.push_back(std::move(reg));
  }
  m.max_rounds = j.at("max_rounds").get<std::size_t>();
  m.tol = j.at("tol").get<double>();
  m.ridge = j.at("ridge").get<double>();
  m.rounds = j.at("rounds").get<std::size_t>();
  m.converged = j.at("converged").get<bool>();
  m.round_max_change = j.at("round_max_change").get<std::vector<double>>();
  m.contraction_ok = j.at("contraction_ok").get<bool>();
  return m;
}

Json serialize(const DecisionTree& tree) {
  std::vector<std::int32_t> feature, left, right;
  std::vector<double> threshold, count0, count1;
  for (const auto& n : tree.nodes()) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    count0.push_back(n.count0);
    count1.push_back(n.count1);
  }
  return Json{{"feature", feature}, {"threshold", threshold}, {"left", left},
              {"right", right},     {"count0", count0},       {"count1", count1}};
}

DecisionTree tree_from_json(const Json& j) {
  const auto feature = j.at("feature").get<std::vector<std::int32_t>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<std::int32_t>>();
  const auto right = j.at("right").get<std::vector<std::int32_t>>();
  const auto count0 = j.at("count0").get<std::vector<double>>();
  const auto count1 = j.at("count1").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || count0.size() != n ||
      count1.size() != n) {
    throw ParseError("tree node arrays differ in length");
  }
  std::vector<TreeNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = TreeNode{feature[i], threshold[i], left[i], right[i], count0[i], count1[i]};
  }
  return DecisionTree(std::move(nodes));
}

Json serialize(const EnsembleConfig& c) {
  return Json{{"n_estimators", c.n_estimators},
              {"max_features", c.max_features},
              {"bootstrap", c.bootstrap},
              {"bootstrap_features", c.bootstrap_features},
              {"max_depth", optional_json(c.max_depth)},
              {"min_leaf", c.min_leaf},
              {"split_features", optional_json(c.split_features)},
              {"seed", c.seed}};
}

EnsembleConfig ensemble_config_from_json(const Json& j) {
  EnsembleConfig c;
  c.n_estimators = j.at("n_estimators").get<std::size_t>();
  c.max_features = j.at("max_features").get<double>();
  c.bootstrap = j.at("bootstrap").get<bool>();
  c.bootstrap_features = j.at("bootstrap_features").get<bool>();
  c.max_depth = optional_from_json<std::size_t>(j.at("max_depth"));
  c.min_leaf = j.at("min_leaf").get<std::size_t>();
  c.split_features = optional_from_json<std::size_t>(j.at("split_features"));
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

Json serialize(const BaggedEnsemble& e) {
  Json trees = Json::array();
  for (const auto& t : e.trees()) trees.push_back(serialize(t));
  Json bags = Json::array();
  for (const auto& b : e.bags()) {
    bags.push_back(Json{{"minority", b.minority},
                        {"majority", b.majority},
                        {"rows", b.rows},
                        {"distinct", b.distinct}});
  }
  return Json{{"kind", to_string(e.ensemble_kind())},
              {"n_features", e.n_features()},
              {"feature_names", e.feature_names},
              {"config", serialize(e.config())},
              {"patches", e.feature_patches()},
              {"bags", bags},
              {"trees", trees}};
}

BaggedEnsemble ensemble_from_json(const Json& j) {
  const auto kind_name = j.at("kind").get<std::string>();
  EnsembleKind kind;
  if (kind_name == "balanced_bagging") {
    kind = EnsembleKind::kBalancedBagging;
  } else if (kind_name == "random_forest") {
    kind = EnsembleKind::kRandomForest;
  } else {
    throw ParseError("unknown ensemble kind '" + kind_name + "'");
  }
  std::vector<DecisionTree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t));
  std::vector<BagRecord> bags;
  for (const auto& b : j.at("bags")) {
    BagRecord r;
    r.minority = b.at("minority").get<std::size_t>();
    r.majority = b.at("majority").get<std::size_t>();
    r.rows = b.at("rows").get<std::size_t>();
    r.distinct = b.at("distinct").get<std::size_t>();
    bags.push_back(std::move(r));
  }
  BaggedEnsemble e(kind, ensemble_config_from_json(j.at("config")),
                   j.at("n_features").get<std::size_t>(), std::move(trees),
                   j.at("patches").get<std::vector<std::vector<std::size_t>>>(), std::move(bags));
  e.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  return e;
}

Json serialize(const Network& n) {
  Json layers = Json::array();
  for (const auto& l : n.layers) layers.push_back(layer_json(l));
  return Json{{"layers", layers}};
}

Network network_from_json(const Json& j) {
  Network n;
  for (const auto& l : j.at("layers")) n.layers.push_back(layer_from_json(l));
  for (std::size_t i = 1; i < n.layers.size(); ++i) {
    if (n.layers[i].in() != n.layers[i - 1].out()) throw ParseError("network layer shapes do not chain");
  }
  if (n.layers.empty()) throw ParseError("network has no layers");
  return n;
}

Json serialize(const VaeModel& m) {
  return Json{{"trunk", serialize(m.trunk)},
              {"mu_head", layer_json(m.mu_head)},
              {"logvar_head", layer_json(m.logvar_head)},
              {"decoder", serialize(m.decoder)},
              {"input_mean", vector_json(m.input_mean)},
              {"input_scale", vector_json(m.input_scale)}};
}

VaeModel vae_from_json(const Json& j) {
  VaeModel m;
  m.trunk = network_from_json(j.at("trunk"));
  m.mu_head = layer_from_json(j.at("mu_head"));
  m.logvar_head = layer_from_json(j.at("logvar_head"));
  m.decoder = network_from_json(j.at("decoder"));
  m.input_mean = vector_from_json(j.at("input_mean"));
  m.input_scale = vector_from_json(j.at("input_scale"));
  if (m.input_mean.size() != m.input_scale.size()) throw ParseError("VAE standardization shape mismatch");
  return m;
}

Json serialize(const DummyClassifier& d) {
  return Json{{"mode", to_string(d.mode())},
              {"n_features", d.n_features()},
              {"seed", d.seed()},
              {"constant", d.constant()}};
}

DummyClassifier dummy_from_json(const Json& j) {
  return DummyClassifier(parse_dummy_mode(j.at("mode").get<std::string>()),
                         j.at("n_features").get<std::size_t>(), j.at("seed").get<std::uint64_t>(),
                         j.at("constant").get<double>());
}

Json serialize(const ModelBundle& b) {
  Json model = std::visit(
      [](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DummyClassifier>) {
          return Json{{"type", "dummy"}, {"body", serialize(m)}};
        } else if constexpr (std::is_same_v<T, BaggedEnsemble>) {
          return Json{{"type", "ensemble"}, {"body", serialize(m)}};
        } else {
          return Json{{"type", "mlp"}, {"body", serialize(m.network())}};
        }
      },
      b.model);
  return Json{{"format", "backorder-model"},
              {"version", kModelFormatVersion},
              {"model_kind", b.model_kind},
              {"input_columns", b.input_columns},
              {"imputer", b.imputer ? serialize(*b.imputer) : Json(nullptr)},
              {"transform", b.transform ? serialize(*b.transform) : Json(nullptr)},
              {"vae", b.vae ? serialize(*b.vae) : Json(nullptr)},
              {"model", model}};
}

ModelBundle bundle_from_json(const Json& j) {
  if (j.value("format", "") != "backorder-model") throw ParseError("not a model document");
  const int version = j.at("version").get<int>();
  if (version != kModelFormatVersion) {
    throw ParseError("model format version " + std::to_string(version) + " is not supported");
  }
  ModelBundle b;
  b.model_kind = j.at("model_kind").get<std::string>();
  b.input_columns = j.at("input_columns").get<std::vector<std::string>>();
  if (!j.at("imputer").is_null()) b.imputer = imputer_from_json(j.at("imputer"));
  if (!j.at("transform").is_null()) b.transform = transform_from_json(j.at("transform"));
  if (!j.at("vae").is_null()) b.vae = vae_from_json(j.at("vae"));
  const auto& model = j.at("model");
  const auto type = model.at("type").get<std::string>();
  if (type == "dummy") {
    b.model = dummy_from_json(model.at("body"));
  } else if (type == "ensemble") {
    b.model = ensemble_from_json(model.at("body"));
  } else if (type == "mlp") {
    b.model = MlpClassifier(network_from_json(model.at("body")));
  } else {
    throw ParseError("unknown model type '" + type + "'");
  }
  return b;
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  write_json(serialize(bundle), path);
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  try {
    return bundle_from_json(read_json(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what(), -1, path.string());
  }
}

Json serialize(const ConfusionMatrix& cm) {
  return Json{{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

Json serialize(const MetricsReport& m) {
  return Json{{"roc_auc", m.roc_auc},     {"pr_auc", m.pr_auc},
              {"macro_f1", m.macro_f1},   {"precision", m.precision},
              {"recall", m.recall},       {"mcc", m.mcc},
              {"brier", m.brier},         {"threshold", m.threshold},
              {"confusion", serialize(m.confusion)}, {"degenerate", m.degenerate}};
}

Json serialize(const ThresholdChoice& t) {
  return Json{{"threshold", t.threshold},
              {"objective", t.objective},
              {"candidates", t.candidates},
              {"confusion", serialize(t.confusion)}};
}

Json serialize(const ProfitResult& p) {
  Json terms = Json::object();
  const auto& names = cost_term_names();
  for (std::size_t i = 0; i < kCostTerms; ++i) terms[names[i]] = p.terms[i];
  Json params = Json::object();
  const auto values = p.params.to_array();
  for (std::size_t i = 0; i < kCostTerms; ++i) params[names[i]] = values[i];
  return Json{{"revenue", p.revenue}, {"profit", p.profit},         {"terms", terms},
              {"params", params},     {"iterations", p.iterations}, {"converged", p.converged}};
}

Json serialize(const MisclassificationCost& c) {
  return Json{{"fp_cost", c.fp_cost}, {"fn_cost", c.fn_cost}, {"fp", c.fp},
              {"fn", c.fn},           {"total", c.total}};
}

Json serialize(const ImportanceReport& r) {
  Json features = Json::array();
  for (const auto& f : r.ranked()) {
    features.push_back(Json{{"feature", f.feature},
                            {"mean_drop", f.mean_drop},
                            {"std_dev", f.std_dev},
                            {"repeats", f.drops.size()}});
  }
  return Json{{"metric", to_string(r.metric)},
              {"baseline", r.baseline},
              {"repeats", r.repeats},
              {"seed", r.seed},
              {"features", features}};
}

Json serialize(const TrainReport& r) {
  Json j{{"epochs", r.epochs}, {"batch_size", r.batch_size}, {"epoch_loss", r.epoch_loss}};
  if (!r.epoch_reconstruction.empty()) j["epoch_reconstruction"] = r.epoch_reconstruction;
  if (!r.epoch_kl.empty()) j["epoch_kl"] = r.epoch_kl;
  j["gradient_check_error"] =
      r.gradient_check_error >= 0.0 ? Json(r.gradient_check_error) : Json(nullptr);
  return j;
}

Json serialize(const GridSearchResult& g) {
  Json points = Json::array();
  for (const auto& p : g.points) {
    points.push_back(Json{{"n_estimators", p.config.n_estimators},
                          {"max_features", p.config.max_features},
                          {"bootstrap", p.config.bootstrap},
                          {"bootstrap_features", p.config.bootstrap_features},
                          {"fold_scores", p.fold_scores},
                          {"mean_score", p.mean_score}});
  }
  return Json{{"best_index", g.best_index}, {"best", serialize(g.best)}, {"points", points}};
}

Json serialize(const std::vector<ScreeningRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back(Json{{"attribute", r.attribute},
                       {"test", std::string(to_string(r.result.method))},
                       {"statistic", r.result.statistic},
                       {"p_value", r.result.p_value},
                       {"n1", r.result.n1},
                       {"n2", r.result.n2},
                       {"exact", r.result.exact}});
  }
  return out;
}

void write_json(const Json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), -1, path.string());
  }
}

}  // namespace backorder
