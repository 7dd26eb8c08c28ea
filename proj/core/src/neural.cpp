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

#include "backorder/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "backorder/error.hpp"

namespace backorder {
namespace {

constexpr double kDivergenceLimit = 1e6;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation a) {
  switch (a) {
    case Activation::kRelu:
      return z.cwiseMax(0.0);
    case Activation::kSigmoid:
      return z.unaryExpr([](double v) { return sigmoid(v); });
    case Activation::kLinear:
      break;
  }
  return z;
}

// Multiplies `delta` in place by the activation derivative at `z`.
void apply_derivative(Eigen::MatrixXd& delta, const Eigen::MatrixXd& z, Activation a) {
  switch (a) {
    case Activation::kRelu:
      delta = delta.cwiseProduct(z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
      break;
    case Activation::kSigmoid:
      delta = delta.cwiseProduct(z.unaryExpr([](double v) {
        const double s = sigmoid(v);
        return s * (1.0 - s);
      }));
      break;
    case Activation::kLinear:
      break;
  }
}

Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& x, std::span<const std::size_t> order,
                            std::size_t begin, std::size_t end) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(end - begin), x.cols());
  for (std::size_t i = begin; i < end; ++i) {
    out.row(static_cast<Eigen::Index>(i - begin)) = x.row(static_cast<Eigen::Index>(order[i]));
  }
  return out;
}

void check_batch_loss(double loss, std::size_t epoch, std::size_t batch, const char* what) {
  if (!std::isfinite(loss) || loss > kDivergenceLimit) {
    throw NumericalError(std::string(what) + " diverged at epoch " + std::to_string(epoch + 1) +
                         ", batch " + std::to_string(batch + 1) + " (loss " +
                         std::to_string(loss) + "); lower the learning rate");
  }
}

struct ParameterView {
  std::vector<double*> params;
  std::vector<double> analytic;
};

void collect(DenseLayer& layer, const LayerGrad& grad, ParameterView& view) {
  for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
    view.params.push_back(layer.weights.data() + i);
    view.analytic.push_back(grad.weights.data()[i]);
  }
  for (Eigen::Index i = 0; i < layer.biases.size(); ++i) {
    view.params.push_back(layer.biases.data() + i);
    view.analytic.push_back(grad.biases[i]);
  }
}

template <typename LossFn>
double finite_difference_check(ParameterView& view, LossFn&& loss, double h) {
  double worst = 0.0;
  for (std::size_t i = 0; i < view.params.size(); ++i) {
    double& p = *view.params[i];
    const double saved = p;
    p = saved + h;
    const double plus = loss();
    p = saved - h;
    const double minus = loss();
    p = saved;
    const double numeric = (plus - minus) / (2.0 * h);
    const double a = view.analytic[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-3});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  }
  return worst;
}

std::vector<DenseLayer*> vae_layers(VaeModel& m) {
  std::vector<DenseLayer*> out;
  for (auto& l : m.trunk.layers) out.push_back(&l);
  out.push_back(&m.mu_head);
  out.push_back(&m.logvar_head);
  for (auto& l : m.decoder.layers) out.push_back(&l);
  return out;
}

std::vector<const LayerGrad*> vae_grads(const VaeGradients& g) {
  std::vector<const LayerGrad*> out;
  for (const auto& l : g.trunk) out.push_back(&l);
  out.push_back(&g.mu_head);
  out.push_back(&g.logvar_head);
  for (const auto& l : g.decoder) out.push_back(&l);
  return out;
}

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

}  // namespace

std::string to_string(Activation activation) {
  switch (activation) {
    case Activation::kRelu:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kLinear:
      break;
  }
  return "linear";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "linear") return Activation::kLinear;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw ParseError("unknown activation '" + name + "'");
}

Eigen::MatrixXd DenseLayer::preactivate(const Eigen::MatrixXd& x) const {
  if (x.cols() != weights.cols()) {
    throw ArgumentError("dense layer expects " + std::to_string(weights.cols()) +
                        " inputs, got " + std::to_string(x.cols()));
  }
  Eigen::MatrixXd z = x * weights.transpose();
  z.rowwise() += biases.transpose();
  return z;
}

Eigen::MatrixXd DenseLayer::forward(const Eigen::MatrixXd& x) const {
  return activate(preactivate(x), activation);
}

DenseLayer make_layer(std::size_t in, std::size_t out, Activation activation, Rng& rng) {
  if (in == 0 || out == 0) throw ArgumentError("dense layer dimensions must be positive");
  const double gain = activation == Activation::kRelu ? 6.0 : 3.0;
  const double limit = std::sqrt(gain / static_cast<double>(in));
  DenseLayer layer;
  layer.activation = activation;
  layer.weights.resize(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
  for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
      layer.weights(r, c) = rng.uniform(-limit, limit);
    }
  }
  layer.biases = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out));
  return layer;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.biases.size());
  return n;
}

Eigen::MatrixXd Network::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  if (layers.empty()) throw ArgumentError("network has no layers");
  Eigen::MatrixXd a = x;
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  for (const auto& layer : layers) {
    Eigen::MatrixXd z = layer.preactivate(a);
    if (cache) cache->inputs.push_back(std::move(a));
    a = activate(z, layer.activation);
    if (cache) cache->pre.push_back(std::move(z));
  }
  return a;
}

Eigen::MatrixXd Network::backward(const Cache& cache, const Eigen::MatrixXd& d_out,
                                  std::vector<LayerGrad>& grads, bool d_out_is_pre) const {
  grads.resize(layers.size());
  Eigen::MatrixXd delta = d_out;
  for (std::size_t k = layers.size(); k-- > 0;) {
    if (!(d_out_is_pre && k + 1 == layers.size())) {
      apply_derivative(delta, cache.pre[k], layers[k].activation);
    }
    grads[k].weights = delta.transpose() * cache.inputs[k];
    grads[k].biases = delta.colwise().sum().transpose();
    delta = delta * layers[k].weights;
  }
  return delta;
}

Network make_network(std::size_t in, std::span<const std::size_t> sizes, Activation hidden,
                     Activation output, Rng& rng) {
  if (sizes.empty()) throw ArgumentError("network needs at least one layer");
  Network net;
  std::size_t prev = in;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const bool last = i + 1 == sizes.size();
    net.layers.push_back(make_layer(prev, sizes[i], last ? output : hidden, rng));
    prev = sizes[i];
  }
  return net;
}

void Adam::step(std::vector<DenseLayer*> layers, const std::vector<const LayerGrad*>& grads) {
  if (layers.size() != grads.size()) throw ArgumentError("adam: layer/gradient count mismatch");
  if (m_.empty()) {
    for (const auto* l : layers) {
      m_.push_back({Eigen::MatrixXd::Zero(l->weights.rows(), l->weights.cols()),
                    Eigen::VectorXd::Zero(l->biases.size())});
    }
    v_ = m_;
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i]->weights, m_[i].weights, v_[i].weights, grads[i]->weights);
    update(layers[i]->biases, m_[i].biases, v_[i].biases, grads[i]->biases);
  }
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd VaeModel::normalize(const Eigen::MatrixXd& x) const {
  if (input_mean.size() == 0) return x;
  if (input_mean.size() != x.cols() || input_scale.size() != x.cols()) {
    throw ArgumentError("VAE input standardization does not match the feature count");
  }
  return ((x.rowwise() - input_mean.transpose()).array().rowwise() /
          input_scale.transpose().array())
      .matrix();
}

VaeModel::Encoding VaeModel::encode(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd h = trunk.forward(normalize(x));
  return Encoding{mu_head.forward(h), logvar_head.forward(h)};
}

Eigen::MatrixXd VaeModel::decode(const Eigen::MatrixXd& z) const { return decoder.forward(z); }

VaeModel make_vae(std::size_t input_dim, std::size_t latent_dim, std::size_t hidden,
                  std::uint64_t seed) {
  if (input_dim == 0 || latent_dim == 0 || hidden == 0) {
    throw ArgumentError("VAE dimensions must be positive");
  }
  Rng rng(seed);
  VaeModel m;
  m.trunk.layers.push_back(make_layer(input_dim, hidden, Activation::kRelu, rng));
  m.mu_head = make_layer(hidden, latent_dim, Activation::kLinear, rng);
  m.logvar_head = make_layer(hidden, latent_dim, Activation::kLinear, rng);
  m.decoder.layers.push_back(make_layer(latent_dim, hidden, Activation::kRelu, rng));
  m.decoder.layers.push_back(make_layer(hidden, input_dim, Activation::kLinear, rng));
  return m;
}

double gaussian_kl(std::span<const double> mu, std::span<const double> logvar) {
  if (mu.size() != logvar.size()) throw ArgumentError("mu and logvar differ in length");
  double kl = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    kl += mu[i] * mu[i] + std::exp(logvar[i]) - 1.0 - logvar[i];
  }
  return 0.5 * kl;
}

ElboComponents elbo_loss(const VaeModel& model, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& eps) {
  VaeGradients unused;
  return elbo_loss_and_gradients(model, x, eps, unused);
}

ElboComponents elbo_loss(const VaeModel& model, const Eigen::MatrixXd& x, Rng& rng) {
  return elbo_loss(model, x,
                   normal_matrix(x.rows(), static_cast<Eigen::Index>(model.latent_dim()), rng));
}

ElboComponents elbo_loss_and_gradients(const VaeModel& model, const Eigen::MatrixXd& x_raw,
                                       const Eigen::MatrixXd& eps, VaeGradients& grads) {
  if (static_cast<std::size_t>(x_raw.cols()) != model.input_dim()) {
    throw ArgumentError("VAE expects " + std::to_string(model.input_dim()) + " features, got " +
                        std::to_string(x_raw.cols()));
  }
  if (x_raw.rows() == 0) throw ArgumentError("ELBO needs a non-empty batch");
  const Eigen::MatrixXd x = model.normalize(x_raw);
  if (eps.rows() != x.rows() || static_cast<std::size_t>(eps.cols()) != model.latent_dim()) {
    throw ArgumentError("noise matrix must be batch x latent_dim");
  }
  const double b = static_cast<double>(x.rows());

  Network::Cache trunk_cache, decoder_cache;
  const Eigen::MatrixXd h = model.trunk.forward(x, &trunk_cache);
  const Eigen::MatrixXd mu = model.mu_head.preactivate(h);
  const Eigen::MatrixXd logvar = model.logvar_head.preactivate(h);
  const Eigen::MatrixXd var = logvar.array().exp().matrix();
  const Eigen::MatrixXd sigma = (0.5 * logvar.array()).exp().matrix();
  const Eigen::MatrixXd z = mu + sigma.cwiseProduct(eps);
  const Eigen::MatrixXd x_hat = model.decoder.forward(z, &decoder_cache);

  const Eigen::MatrixXd diff = x_hat - x;
  ElboComponents out;
  out.reconstruction = 0.5 * diff.squaredNorm() / b;
  out.kl = 0.5 * (mu.array().square() + var.array() - 1.0 - logvar.array()).sum() / b;
  out.loss = out.reconstruction + out.kl;

  const Eigen::MatrixXd dz = model.decoder.backward(decoder_cache, diff / b, grads.decoder);
  const Eigen::MatrixXd dmu = dz + mu / b;
  const Eigen::MatrixXd dlogvar =
      (0.5 * dz.array() * eps.array() * sigma.array() + 0.5 * (var.array() - 1.0) / b).matrix();
  grads.mu_head.weights = dmu.transpose() * h;
  grads.mu_head.biases = dmu.colwise().sum().transpose();
  grads.logvar_head.weights = dlogvar.transpose() * h;
  grads.logvar_head.biases = dlogvar.colwise().sum().transpose();
  const Eigen::MatrixXd dh = dmu * model.mu_head.weights + dlogvar * model.logvar_head.weights;
  model.trunk.backward(trunk_cache, dh, grads.trunk);
  return out;
}

double check_vae_gradients(const VaeModel& model, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& eps, double h) {
  VaeModel copy = model;
  VaeGradients grads;
  elbo_loss_and_gradients(copy, x, eps, grads);
  ParameterView view;
  auto layers = vae_layers(copy);
  auto g = vae_grads(grads);
  for (std::size_t i = 0; i < layers.size(); ++i) collect(*layers[i], *g[i], view);
  return finite_difference_check(view, [&] { return elbo_loss(copy, x, eps).loss; }, h);
}

VaeFit train_vae(const FeatureMatrix& x, const VaeOptions& options) {
  if (options.epochs < 1) throw ArgumentError("VAE training needs epochs >= 1");
  if (options.batch_size < 1) throw ArgumentError("batch size must be >= 1");
  if (x.rows() == 0 || x.cols() == 0) throw ArgumentError("VAE training needs a non-empty matrix");
  if (!x.allFinite()) throw DataError("VAE input contains non-finite values");
  const auto n = static_cast<std::size_t>(x.rows());

  VaeFit fit;
  fit.model = make_vae(static_cast<std::size_t>(x.cols()), options.latent_dim, options.hidden,
                       derive_seed(options.seed, 0));
  fit.model.input_mean = x.colwise().mean().transpose();
  fit.model.input_scale =
      ((x.rowwise() - fit.model.input_mean.transpose()).array().square().colwise().sum() /
       static_cast<double>(n))
          .sqrt()
          .transpose();
  for (Eigen::Index j = 0; j < fit.model.input_scale.size(); ++j) {
    if (!(fit.model.input_scale[j] > 0.0)) fit.model.input_scale[j] = 1.0;
  }
  Rng shuffle_rng(derive_seed(options.seed, 1));
  Rng noise_rng(derive_seed(options.seed, 2));
  Rng eval_rng(derive_seed(options.seed, 3));
  const Eigen::MatrixXd eval_eps =
      normal_matrix(x.rows(), static_cast<Eigen::Index>(options.latent_dim), eval_rng);

  Adam adam(options.learning_rate);
  auto order = identity_order(n);
  VaeGradients grads;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0, batch = 0; start < n; start += options.batch_size, ++batch) {
      const std::size_t end = std::min(n, start + options.batch_size);
      const Eigen::MatrixXd xb = gather_rows(x, order, start, end);
      const Eigen::MatrixXd eps = normal_matrix(
          xb.rows(), static_cast<Eigen::Index>(options.latent_dim), noise_rng);
      const auto loss = elbo_loss_and_gradients(fit.model, xb, eps, grads);
      check_batch_loss(loss.loss, epoch, batch, "VAE training");
      adam.step(vae_layers(fit.model), vae_grads(grads));
    }
    const auto eval = elbo_loss(fit.model, x, eval_eps);
    check_batch_loss(eval.loss, epoch, 0, "VAE evaluation");
    fit.report.epoch_loss.push_back(eval.loss);
    fit.report.epoch_reconstruction.push_back(eval.reconstruction);
    fit.report.epoch_kl.push_back(eval.kl);
  }
  fit.report.epochs = options.epochs;
  fit.report.batch_size = options.batch_size;
  if (options.gradient_check) {
    const Eigen::Index rows = std::min<Eigen::Index>(x.rows(), 8);
    fit.report.gradient_check_error =
        check_vae_gradients(fit.model, x.topRows(rows), eval_eps.topRows(rows));
  }
  return fit;
}

VaeFit train_vae(const DataTable& table, std::span<const std::size_t> train_idx,
                 const VaeOptions& options) {
  return train_vae(to_matrix(table, train_idx, table.feature_columns()), options);
}

FeatureMatrix encode_and_augment(const VaeModel& model, const FeatureMatrix& x) {
  if (static_cast<std::size_t>(x.cols()) != model.input_dim()) {
    throw ArgumentError("augmentation expects " + std::to_string(model.input_dim()) +
                        " features, got " + std::to_string(x.cols()));
  }
  const auto enc = model.encode(x);
  FeatureMatrix out(x.rows(), x.cols() + enc.mu.cols());
  out << x, enc.mu;
  return out;
}

Eigen::MatrixXd reconstruct(const VaeModel& model, const Eigen::MatrixXd& x) {
  return model.decode(model.encode(x).mu);
}

// ---------------------------------------------------------------------------

double weighted_bce(const Eigen::VectorXd& logits, std::span<const std::uint8_t> y,
                    double class_weight) {
  if (static_cast<std::size_t>(logits.size()) != y.size()) {
    throw ArgumentError("logits and labels differ in length");
  }
  if (y.empty()) throw ArgumentError("loss needs a non-empty batch");
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double z = logits[static_cast<Eigen::Index>(i)];
    sum += y[i] ? class_weight * softplus(-z) : softplus(z);
  }
  return sum / static_cast<double>(y.size());
}

double mlp_loss(const Network& network, const Eigen::MatrixXd& x,
                std::span<const std::uint8_t> y, double class_weight) {
  Network::Cache cache;
  network.forward(x, &cache);
  return weighted_bce(cache.pre.back().col(0), y, class_weight);
}

double mlp_loss_and_gradients(const Network& network, const Eigen::MatrixXd& x,
                              std::span<const std::uint8_t> y, double class_weight,
                              std::vector<LayerGrad>& grads) {
  if (network.output_dim() != 1) throw ArgumentError("classifier network needs one output");
  Network::Cache cache;
  network.forward(x, &cache);
  const Eigen::VectorXd logits = cache.pre.back().col(0);
  const double loss = weighted_bce(logits, y, class_weight);
  const double b = static_cast<double>(y.size());
  Eigen::MatrixXd dz(logits.size(), 1);
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double s = sigmoid(logits[i]);
    dz(i, 0) = (y[static_cast<std::size_t>(i)] ? class_weight * (s - 1.0) : s) / b;
  }
  network.backward(cache, dz, grads, true);
  return loss;
}

double check_mlp_gradients(const Network& network, const Eigen::MatrixXd& x,
                           std::span<const std::uint8_t> y, double class_weight, double h) {
  Network copy = network;
  std::vector<LayerGrad> grads;
  mlp_loss_and_gradients(copy, x, y, class_weight, grads);
  ParameterView view;
  for (std::size_t i = 0; i < copy.layers.size(); ++i) collect(copy.layers[i], grads[i], view);
  return finite_difference_check(view, [&] { return mlp_loss(copy, x, y, class_weight); }, h);
}

MlpClassifier::MlpClassifier(Network network) : network_(std::move(network)) {
  if (network_.layers.empty() || network_.output_dim() != 1) {
    throw ArgumentError("MLP classifier needs a network with one output");
  }
}

std::vector<double> MlpClassifier::predict_logits(const FeatureMatrix& x) const {
  Network::Cache cache;
  network_.forward(x, &cache);
  const auto& z = cache.pre.back();
  return std::vector<double>(z.data(), z.data() + z.rows());
}

std::vector<double> MlpClassifier::predict_proba(const FeatureMatrix& x) const {
  auto out = predict_logits(x);
  for (auto& v : out) v = sigmoid(v);
  return out;
}

MlpFit train_mlp_classifier(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                            const MlpOptions& options) {
  if (options.hidden_sizes.empty()) throw ArgumentError("MLP needs at least one hidden layer");
  if (options.epochs < 1) throw ArgumentError("MLP training needs epochs >= 1");
  if (options.batch_size < 1) throw ArgumentError("batch size must be >= 1");
  if (!(options.class_weight > 0.0)) throw ArgumentError("class_weight must be positive");
  if (static_cast<std::size_t>(x.rows()) != y.size() || y.empty()) {
    throw ArgumentError("MLP training needs equal, non-zero feature and label counts");
  }
  if (!x.allFinite()) throw DataError("MLP input contains non-finite values");
  const auto n = y.size();

  std::vector<std::size_t> sizes = options.hidden_sizes;
  sizes.push_back(1);
  Rng init_rng(derive_seed(options.seed, 0));
  Rng shuffle_rng(derive_seed(options.seed, 1));
  Network net = make_network(static_cast<std::size_t>(x.cols()), sizes, Activation::kRelu,
                             Activation::kSigmoid, init_rng);

  Adam adam(options.learning_rate);
  auto order = identity_order(n);
  std::vector<LayerGrad> grads;
  TrainReport report;
  std::vector<std::uint8_t> yb;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0, batch = 0; start < n; start += options.batch_size, ++batch) {
      const std::size_t end = std::min(n, start + options.batch_size);
      const Eigen::MatrixXd xb = gather_rows(x, order, start, end);
      yb.clear();
      for (std::size_t i = start; i < end; ++i) yb.push_back(y[order[i]]);
      const double loss = mlp_loss_and_gradients(net, xb, yb, options.class_weight, grads);
      check_batch_loss(loss, epoch, batch, "MLP training");
      std::vector<DenseLayer*> layers;
      std::vector<const LayerGrad*> g;
      for (std::size_t k = 0; k < net.layers.size(); ++k) {
        layers.push_back(&net.layers[k]);
        g.push_back(&grads[k]);
      }
      adam.step(layers, g);
    }
    report.epoch_loss.push_back(mlp_loss(net, x, y, options.class_weight));
  }
  report.epochs = options.epochs;
  report.batch_size = options.batch_size;
  if (options.gradient_check) {
    const Eigen::Index rows = std::min<Eigen::Index>(x.rows(), 8);
    report.gradient_check_error = check_mlp_gradients(
        net, x.topRows(rows), y.subspan(0, static_cast<std::size_t>(rows)), options.class_weight);
  }
  return MlpFit{MlpClassifier(std::move(net)), std::move(report)};
}

MlpFit train_mlp_classifier(const DataTable& table, std::span<const std::size_t> train_idx,
                            const MlpOptions& options) {
  const auto labels = table.labels(train_idx);
  return train_mlp_classifier(to_matrix(table, train_idx, table.feature_columns()), labels,
                              options);
}

}  // namespace backorder
