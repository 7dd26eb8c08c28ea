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

#ifndef BACKORDER_NEURAL_HPP_
#define BACKORDER_NEURAL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "backorder/classifier.hpp"
#include "backorder/dataset.hpp"
#include "backorder/random.hpp"

namespace backorder {

enum class Activation { kRelu, kLinear, kSigmoid };

std::string to_string(Activation activation);
Activation parse_activation(const std::string& name);

// Batches are row-major in the sense of samples: x is (batch x in).
struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd biases;   // out
  Activation activation = Activation::kLinear;

  std::size_t in() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t out() const { return static_cast<std::size_t>(weights.rows()); }

  Eigen::MatrixXd preactivate(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
};

// Uniform in +-sqrt(6 / fan_in) for relu, +-sqrt(3 / fan_in) otherwise; zero
// biases.
DenseLayer make_layer(std::size_t in, std::size_t out, Activation activation, Rng& rng);

struct LayerGrad {
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;
};

struct Network {
  std::vector<DenseLayer> layers;

  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // input of each layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
  };

  std::size_t input_dim() const { return layers.front().in(); }
  std::size_t output_dim() const { return layers.back().out(); }
  std::size_t parameter_count() const;

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const;
  // Backpropagates `d_out` and returns d(loss)/d(input). With
  // `d_out_is_pre = true` the gradient is taken to be w.r.t. the last layer's
  // pre-activation (used for losses written on logits).
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& d_out,
                           std::vector<LayerGrad>& grads, bool d_out_is_pre = false) const;
};

// Hidden layers use `hidden`, the last one `output`.
Network make_network(std::size_t in, std::span<const std::size_t> sizes, Activation hidden,
                     Activation output, Rng& rng);

// Adam with per-parameter first and second moments.
class Adam {
 public:
  explicit Adam(double learning_rate = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  void step(std::vector<DenseLayer*> layers, const std::vector<const LayerGrad*>& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<LayerGrad> m_, v_;
};

// ---------------------------------------------------------------------------
// Variational autoencoder
// ---------------------------------------------------------------------------

struct VaeModel {
  Network trunk;          // input -> hidden, relu
  DenseLayer mu_head;     // hidden -> latent, linear
  DenseLayer logvar_head; // hidden -> latent, linear
  Network decoder;        // latent -> hidden relu -> input linear
  // Per-feature standardization applied to inputs before encoding; empty
  // means identity. Reconstructions live in the standardized space.
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;

  Eigen::MatrixXd normalize(const Eigen::MatrixXd& x) const;

  std::size_t input_dim() const { return trunk.input_dim(); }
  std::size_t latent_dim() const { return mu_head.out(); }

  struct Encoding {
    Eigen::MatrixXd mu;
    Eigen::MatrixXd logvar;
  };
  Encoding encode(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd decode(const Eigen::MatrixXd& z) const;
};

VaeModel make_vae(std::size_t input_dim, std::size_t latent_dim, std::size_t hidden,
                  std::uint64_t seed);

struct ElboComponents {
  double loss = 0.0;
  double reconstruction = 0.0;
  double kl = 0.0;
};

struct VaeGradients {
  std::vector<LayerGrad> trunk;
  LayerGrad mu_head;
  LayerGrad logvar_head;
  std::vector<LayerGrad> decoder;
};

// KL(N(mu, exp(logvar)) || N(0, I)) for one diagonal Gaussian.
double gaussian_kl(std::span<const double> mu, std::span<const double> logvar);

// Negative ELBO, batch-averaged, with z = mu + exp(logvar / 2) * eps. The
// reconstruction term is the unit-variance Gaussian negative log-likelihood
// 0.5 * sum_j (x_j - f(z)_j)^2 up to a constant.
ElboComponents elbo_loss(const VaeModel& model, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& eps);
ElboComponents elbo_loss(const VaeModel& model, const Eigen::MatrixXd& x, Rng& rng);
ElboComponents elbo_loss_and_gradients(const VaeModel& model, const Eigen::MatrixXd& x,
                                       const Eigen::MatrixXd& eps, VaeGradients& grads);

struct TrainReport {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_reconstruction;  // VAE only
  std::vector<double> epoch_kl;              // VAE only
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  // Max relative error of analytic vs central-difference gradients on a small
  // batch after training; negative when the check was skipped.
  double gradient_check_error = -1.0;
};

struct VaeOptions {
  std::size_t latent_dim = 10;
  std::size_t hidden = 32;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  bool gradient_check = true;
};

struct VaeFit {
  VaeModel model;
  TrainReport report;
};

// Throws NumericalError when a batch loss exceeds 1e6 or is not finite.
VaeFit train_vae(const FeatureMatrix& x, const VaeOptions& options);
VaeFit train_vae(const DataTable& table, std::span<const std::size_t> train_idx,
                 const VaeOptions& options);

// [X | mu(X)]; no sampling.
FeatureMatrix encode_and_augment(const VaeModel& model, const FeatureMatrix& x);

// ---------------------------------------------------------------------------
// Multilayer perceptron classifier
// ---------------------------------------------------------------------------

// Mean over the batch of w * y * softplus(-z) + (1 - y) * softplus(z) with z
// the output logit and w the positive-class weight.
double weighted_bce(const Eigen::VectorXd& logits, std::span<const std::uint8_t> y,
                    double class_weight);
double mlp_loss(const Network& network, const Eigen::MatrixXd& x,
                std::span<const std::uint8_t> y, double class_weight);
double mlp_loss_and_gradients(const Network& network, const Eigen::MatrixXd& x,
                              std::span<const std::uint8_t> y, double class_weight,
                              std::vector<LayerGrad>& grads);

class MlpClassifier final : public Classifier {
 public:
  MlpClassifier() = default;
  explicit MlpClassifier(Network network);

  std::vector<double> predict_proba(const FeatureMatrix& x) const override;
  std::size_t n_features() const override { return network_.input_dim(); }
  std::string kind() const override { return "mlp"; }

  std::vector<double> predict_logits(const FeatureMatrix& x) const;
  const Network& network() const { return network_; }

 private:
  Network network_;
};

struct MlpOptions {
  std::vector<std::size_t> hidden_sizes = {32, 16};
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double class_weight = 1.0;
  std::uint64_t seed = 0;
  bool gradient_check = true;
};

struct MlpFit {
  MlpClassifier model;
  TrainReport report;
};

MlpFit train_mlp_classifier(const FeatureMatrix& x, std::span<const std::uint8_t> y,
                            const MlpOptions& options);
MlpFit train_mlp_classifier(const DataTable& table, std::span<const std::size_t> train_idx,
                            const MlpOptions& options);

// Central-difference gradient checks. Relative error per parameter is
// |a - n| / max(|a|, |n|, 1e-3); the maximum is returned.
double check_vae_gradients(const VaeModel& model, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& eps, double h = 1e-5);
double check_mlp_gradients(const Network& network, const Eigen::MatrixXd& x,
                           std::span<const std::uint8_t> y, double class_weight,
                           double h = 1e-5);

// Decoder applied to the latent means (standardized space).
Eigen::MatrixXd reconstruct(const VaeModel& model, const Eigen::MatrixXd& x);

}  // namespace backorder

#endif  // BACKORDER_NEURAL_HPP_
