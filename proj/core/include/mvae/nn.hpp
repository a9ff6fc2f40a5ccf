// core/include/mvae/nn.hpp

// Copyright 2026  The mvae Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MVAE_NN_HPP_
#define MVAE_NN_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mvae {

// Lower bound on decoder variances.
inline constexpr double kVarianceFloor = 1e-10;
// Added to power spectra before the encoder takes their logarithm.
inline constexpr double kLogFloor = 1e-12;

enum class Activation { kRelu, kIdentity };

std::string ToString(Activation a);
Activation ActivationFromString(const std::string& s);

// Inference-mode batch normalization, applied after the affine map and
// before the activation:
//   y = gamma * (x - running_mean) / sqrt(running_var + epsilon) + beta
struct BatchNorm {
  std::vector<float> gamma;
  std::vector<float> beta;
  std::vector<float> running_mean;
  std::vector<float> running_var;
  float epsilon = 1e-3f;
};

struct DenseLayer {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<float> weight;  // out_dim x in_dim, row-major
  std::vector<float> bias;    // out_dim
  Activation activation = Activation::kIdentity;
  std::optional<BatchNorm> batch_norm;
};

// Frequency-wise standardization of the encoder's log-power input.
struct Standardization {
  std::vector<float> mean;
  std::vector<float> stddev;
};

struct NetworkWeights {
  std::vector<DenseLayer> layers;
  std::optional<Standardization> input_standardization;

  int input_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().out_dim; }
};

// Generative network (latent_dim -> spectrum_dim log-variances) and
// recognition network (spectrum_dim -> latent_dim means, then latent_dim
// log-variances).
struct VaeWeights {
  int latent_dim = 0;
  int spectrum_dim = 0;
  NetworkWeights decoder;
  NetworkWeights encoder;
};

// Throws FormatError naming the offending layer when shapes do not chain,
// statistics are non-positive or entries are non-finite.
void Validate(const VaeWeights& w);

VaeWeights LoadVaeWeights(const std::filesystem::path& path);
void SaveVaeWeights(const VaeWeights& w, const std::filesystem::path& path);

// Compiled inference-mode network. Immutable; Forward may be called
// concurrently.
class FeedForward {
 public:
  FeedForward() = default;
  explicit FeedForward(const NetworkWeights& w);

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }

  // out = network(in). Sizes must match input_dim/output_dim.
  void Forward(std::span<const double> in, std::span<double> out) const;

 private:
  struct Layer {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> weight;
    Eigen::VectorXd bias;
    // Batch norm folded to y = scale * x + shift (identity when absent).
    Eigen::VectorXd bn_scale;
    Eigen::VectorXd bn_shift;
    bool has_bn = false;
    Activation activation = Activation::kIdentity;
  };
  std::vector<Layer> layers_;
  int input_dim_ = 0;
  int output_dim_ = 0;
  int max_width_ = 0;
};

struct EncoderOutput {
  std::vector<double> mean;      // L
  std::vector<double> variance;  // L, positive
};

class Vae {
 public:
  explicit Vae(VaeWeights weights);

  int latent_dim() const { return weights_.latent_dim; }
  int spectrum_dim() const { return weights_.spectrum_dim; }
  const VaeWeights& weights() const { return weights_; }

  // sigma_f^2(z) for f = 0..F-1: exp of the decoder output, floored at
  // kVarianceFloor. Throws CorruptWeightsError on non-finite output.
  std::vector<double> DecoderForward(std::span<const double> z) const;
  void DecoderForward(std::span<const double> z, std::span<double> variance) const;

  // Posterior parameters of q(z | s) from a power spectrum |s|^2.
  EncoderOutput EncoderForward(std::span<const double> power_spectrum) const;

 private:
  VaeWeights weights_;
  FeedForward decoder_;
  FeedForward encoder_;
  std::vector<double> std_mean_;
  std::vector<double> std_inv_scale_;
};

struct RandomVaeOptions {
  int latent_dim = 16;
  int spectrum_dim = 513;
  std::vector<int> hidden = {128};
  std::uint64_t seed = 0;
  // Multiplies the Glorot-uniform limit of every layer.
  double weight_gain = 1.0;
  // Constant added to the decoder output bias (mean log-variance).
  double decoder_output_bias = 0.0;
  // All-zero encoder: mean 0, variance 1 for every input.
  bool zero_encoder = false;
};

// Randomly initialized networks with identity standardization; for
// synthetic experiments and pipeline smoke runs.
VaeWeights RandomVae(const RandomVaeOptions& options);

}  // namespace mvae

#endif  // MVAE_NN_HPP_
