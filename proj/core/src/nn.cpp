// core/src/nn.cpp

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

#include "mvae/nn.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "container.hpp"
#include "mvae/error.hpp"

namespace mvae {

namespace {

constexpr const char* kVaeType = "vae";

void CheckFinite(const std::vector<float>& v, const std::string& what) {
  for (float x : v) {
    if (!std::isfinite(x)) throw FormatError(what + ": non-finite entry");
  }
}

void CheckSize(const std::vector<float>& v, std::size_t n, const std::string& what) {
  if (v.size() != n) {
    throw FormatError(what + ": expected " + std::to_string(n) + " values, found " +
                      std::to_string(v.size()));
  }
}

void ValidateNetwork(const NetworkWeights& net, const std::string& name, int in_dim, int out_dim) {
  if (net.layers.empty()) throw FormatError(name + ": no layers");
  int prev = in_dim;
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const DenseLayer& layer = net.layers[k];
    const std::string where = name + " layer " + std::to_string(k);
    if (layer.in_dim != prev) {
      throw FormatError(where + ": input dimension " + std::to_string(layer.in_dim) +
                        " does not match preceding dimension " + std::to_string(prev));
    }
    if (layer.out_dim < 1) throw FormatError(where + ": empty output");
    CheckSize(layer.weight, static_cast<std::size_t>(layer.in_dim) * layer.out_dim, where + " weight");
    CheckSize(layer.bias, layer.out_dim, where + " bias");
    CheckFinite(layer.weight, where + " weight");
    CheckFinite(layer.bias, where + " bias");
    if (layer.batch_norm) {
      const BatchNorm& bn = *layer.batch_norm;
      for (const auto* v : {&bn.gamma, &bn.beta, &bn.running_mean, &bn.running_var}) {
        CheckSize(*v, layer.out_dim, where + " batch norm");
        CheckFinite(*v, where + " batch norm");
      }
      if (!(bn.epsilon >= 0.0f) || !std::isfinite(bn.epsilon)) {
        throw FormatError(where + ": invalid batch norm epsilon");
      }
      for (float v : bn.running_var) {
        if (!(v > 0.0f)) throw FormatError(where + ": running variance must be positive");
      }
    }
    prev = layer.out_dim;
  }
  if (prev != out_dim) {
    throw FormatError(name + ": output dimension " + std::to_string(prev) + ", expected " +
                      std::to_string(out_dim));
  }
  if (net.input_standardization) {
    const Standardization& s = *net.input_standardization;
    CheckSize(s.mean, in_dim, name + " standardization mean");
    CheckSize(s.stddev, in_dim, name + " standardization std");
    CheckFinite(s.mean, name + " standardization mean");
    CheckFinite(s.stddev, name + " standardization std");
    for (float v : s.stddev) {
      if (!(v > 0.0f)) throw FormatError(name + ": standardization std must be positive");
    }
  }
}

nlohmann::json DescribeNetwork(const NetworkWeights& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const DenseLayer& layer : net.layers) {
    nlohmann::json d = {{"in", layer.in_dim},
                        {"out", layer.out_dim},
                        {"activation", ToString(layer.activation)}};
    if (layer.batch_norm) {
      d["batch_norm"] = {{"epsilon", layer.batch_norm->epsilon}};
    } else {
      d["batch_norm"] = nullptr;
    }
    layers.push_back(d);
  }
  return {{"layers", layers}, {"standardization", net.input_standardization.has_value()}};
}

void AppendTensors(const NetworkWeights& net, const std::string& name,
                   std::vector<internal::Tensor>& out) {
  if (net.input_standardization) {
    const auto dim = net.input_standardization->mean.size();
    out.push_back({name + ".standardization.mean", {dim}, net.input_standardization->mean});
    out.push_back({name + ".standardization.std", {dim}, net.input_standardization->stddev});
  }
  for (std::size_t k = 0; k < net.layers.size(); ++k) {
    const DenseLayer& layer = net.layers[k];
    const std::string prefix = name + ".layers." + std::to_string(k);
    const auto out_dim = static_cast<std::size_t>(layer.out_dim);
    out.push_back({prefix + ".weight", {out_dim, static_cast<std::size_t>(layer.in_dim)}, layer.weight});
    out.push_back({prefix + ".bias", {out_dim}, layer.bias});
    if (layer.batch_norm) {
      out.push_back({prefix + ".bn.gamma", {out_dim}, layer.batch_norm->gamma});
      out.push_back({prefix + ".bn.beta", {out_dim}, layer.batch_norm->beta});
      out.push_back({prefix + ".bn.running_mean", {out_dim}, layer.batch_norm->running_mean});
      out.push_back({prefix + ".bn.running_var", {out_dim}, layer.batch_norm->running_var});
    }
  }
}

// Consumes tensors in manifest order, checking names and shapes.
class TensorReader {
 public:
  explicit TensorReader(std::vector<internal::Tensor>& tensors) : tensors_(tensors) {}

  std::vector<float> Take(const std::string& name, std::vector<std::size_t> shape) {
    if (next_ >= tensors_.size()) throw FormatError("missing tensor " + name);
    internal::Tensor& t = tensors_[next_++];
    if (t.name != name) throw FormatError("expected tensor " + name + ", found " + t.name);
    if (t.shape != shape) throw FormatError("tensor " + name + " has an unexpected shape");
    return std::move(t.values);
  }

  void ExpectEnd() const {
    if (next_ != tensors_.size()) throw FormatError("unexpected extra tensor " + tensors_[next_].name);
  }

 private:
  std::vector<internal::Tensor>& tensors_;
  std::size_t next_ = 0;
};

NetworkWeights ReadNetwork(const nlohmann::json& desc, const std::string& name, int in_dim,
                           TensorReader& reader) {
  NetworkWeights net;
  int prev = in_dim;
  if (desc.at("standardization").get<bool>()) {
    Standardization s;
    const auto dim = static_cast<std::size_t>(in_dim);
    s.mean = reader.Take(name + ".standardization.mean", {dim});
    s.stddev = reader.Take(name + ".standardization.std", {dim});
    net.input_standardization = std::move(s);
  }
  const auto& layers = desc.at("layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& d = layers[k];
    DenseLayer layer;
    layer.in_dim = d.at("in").get<int>();
    layer.out_dim = d.at("out").get<int>();
    const std::string where = name + " layer " + std::to_string(k);
    if (layer.in_dim != prev) {
      throw FormatError(where + ": input dimension " + std::to_string(layer.in_dim) +
                        " does not match preceding dimension " + std::to_string(prev));
    }
    if (layer.out_dim < 1) throw FormatError(where + ": empty output");
    layer.activation = ActivationFromString(d.at("activation").get<std::string>());
    const std::string prefix = name + ".layers." + std::to_string(k);
    const auto out_dim = static_cast<std::size_t>(layer.out_dim);
    layer.weight = reader.Take(prefix + ".weight", {out_dim, static_cast<std::size_t>(layer.in_dim)});
    layer.bias = reader.Take(prefix + ".bias", {out_dim});
    if (d.contains("batch_norm") && !d["batch_norm"].is_null()) {
      BatchNorm bn;
      bn.epsilon = d["batch_norm"].at("epsilon").get<float>();
      bn.gamma = reader.Take(prefix + ".bn.gamma", {out_dim});
      bn.beta = reader.Take(prefix + ".bn.beta", {out_dim});
      bn.running_mean = reader.Take(prefix + ".bn.running_mean", {out_dim});
      bn.running_var = reader.Take(prefix + ".bn.running_var", {out_dim});
      layer.batch_norm = std::move(bn);
    }
    prev = layer.out_dim;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

}  // namespace

std::string ToString(Activation a) {
  return a == Activation::kRelu ? "relu" : "identity";
}

Activation ActivationFromString(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "identity" || s == "linear") return Activation::kIdentity;
  throw FormatError("unknown activation '" + s + "'");
}

void Validate(const VaeWeights& w) {
  if (w.latent_dim < 1) throw FormatError("latent dimension must be positive");
  if (w.spectrum_dim < 1) throw FormatError("spectrum dimension must be positive");
  ValidateNetwork(w.decoder, "decoder", w.latent_dim, w.spectrum_dim);
  ValidateNetwork(w.encoder, "encoder", w.spectrum_dim, 2 * w.latent_dim);
  if (w.decoder.input_standardization) {
    throw FormatError("decoder: input standardization is only defined for the encoder");
  }
}

void SaveVaeWeights(const VaeWeights& w, const std::filesystem::path& path) {
  Validate(w);
  internal::Container c;
  c.manifest = {{"type", kVaeType},
                {"latent_dim", w.latent_dim},
                {"spectrum_dim", w.spectrum_dim},
                {"decoder", DescribeNetwork(w.decoder)},
                {"encoder", DescribeNetwork(w.encoder)}};
  AppendTensors(w.decoder, "decoder", c.tensors);
  AppendTensors(w.encoder, "encoder", c.tensors);
  internal::WriteContainer(path, c);
}

VaeWeights LoadVaeWeights(const std::filesystem::path& path) {
  internal::Container c = internal::ReadContainer(path);
  VaeWeights w;
  try {
    if (c.manifest.at("type").get<std::string>() != kVaeType) {
      throw FormatError("container type is '" + c.manifest["type"].get<std::string>() +
                        "', expected '" + kVaeType + "'");
    }
    w.latent_dim = c.manifest.at("latent_dim").get<int>();
    w.spectrum_dim = c.manifest.at("spectrum_dim").get<int>();
    TensorReader reader(c.tensors);
    w.decoder = ReadNetwork(c.manifest.at("decoder"), "decoder", w.latent_dim, reader);
    w.encoder = ReadNetwork(c.manifest.at("encoder"), "encoder", w.spectrum_dim, reader);
    reader.ExpectEnd();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed network manifest in ") + path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " (" + path.string() + ")");
  }
  Validate(w);
  return w;
}

FeedForward::FeedForward(const NetworkWeights& w) {
  input_dim_ = w.input_dim();
  output_dim_ = w.output_dim();
  max_width_ = input_dim_;
  for (const DenseLayer& src : w.layers) {
    Layer layer;
    layer.weight.resize(src.out_dim, src.in_dim);
    for (int o = 0; o < src.out_dim; ++o) {
      for (int i = 0; i < src.in_dim; ++i) {
        layer.weight(o, i) = src.weight[static_cast<std::size_t>(o) * src.in_dim + i];
      }
    }
    layer.bias.resize(src.out_dim);
    for (int o = 0; o < src.out_dim; ++o) layer.bias(o) = src.bias[o];
    if (src.batch_norm) {
      const BatchNorm& bn = *src.batch_norm;
      layer.has_bn = true;
      layer.bn_scale.resize(src.out_dim);
      layer.bn_shift.resize(src.out_dim);
      for (int o = 0; o < src.out_dim; ++o) {
        const double scale =
            static_cast<double>(bn.gamma[o]) /
            std::sqrt(static_cast<double>(bn.running_var[o]) + static_cast<double>(bn.epsilon));
        layer.bn_scale(o) = scale;
        layer.bn_shift(o) = static_cast<double>(bn.beta[o]) - scale * bn.running_mean[o];
      }
    }
    layer.activation = src.activation;
    max_width_ = std::max(max_width_, src.out_dim);
    layers_.push_back(std::move(layer));
  }
}

void FeedForward::Forward(std::span<const double> in, std::span<double> out) const {
  if (static_cast<int>(in.size()) != input_dim_ || static_cast<int>(out.size()) != output_dim_) {
    throw ConfigError("network expects " + std::to_string(input_dim_) + " inputs and " +
                      std::to_string(output_dim_) + " outputs");
  }
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(in.data(), input_dim_);
  Eigen::VectorXd b;
  for (const Layer& layer : layers_) {
    b.noalias() = layer.weight * a;
    b += layer.bias;
    if (layer.has_bn) b = b.cwiseProduct(layer.bn_scale) + layer.bn_shift;
    if (layer.activation == Activation::kRelu) b = b.cwiseMax(0.0);
    a.swap(b);
  }
  Eigen::Map<Eigen::VectorXd>(out.data(), output_dim_) = a;
}

Vae::Vae(VaeWeights weights) : weights_(std::move(weights)) {
  Validate(weights_);
  decoder_ = FeedForward(weights_.decoder);
  encoder_ = FeedForward(weights_.encoder);
  const int F = weights_.spectrum_dim;
  std_mean_.assign(F, 0.0);
  std_inv_scale_.assign(F, 1.0);
  if (weights_.encoder.input_standardization) {
    const Standardization& s = *weights_.encoder.input_standardization;
    for (int f = 0; f < F; ++f) {
      std_mean_[f] = s.mean[f];
      std_inv_scale_[f] = 1.0 / static_cast<double>(s.stddev[f]);
    }
  }
}

std::vector<double> Vae::DecoderForward(std::span<const double> z) const {
  std::vector<double> var(weights_.spectrum_dim);
  DecoderForward(z, var);
  return var;
}

void Vae::DecoderForward(std::span<const double> z, std::span<double> variance) const {
  if (static_cast<int>(z.size()) != latent_dim()) {
    throw ConfigError("decoder: latent vector has " + std::to_string(z.size()) +
                      " entries, expected " + std::to_string(latent_dim()));
  }
  decoder_.Forward(z, variance);
  for (double& v : variance) {
    v = std::exp(v);
    if (!std::isfinite(v)) throw CorruptWeightsError("decoder produced a non-finite variance");
    v = std::max(v, kVarianceFloor);
  }
}

EncoderOutput Vae::EncoderForward(std::span<const double> power_spectrum) const {
  const int F = spectrum_dim();
  const int L = latent_dim();
  if (static_cast<int>(power_spectrum.size()) != F) {
    throw ConfigError("encoder: spectrum has " + std::to_string(power_spectrum.size()) +
                      " bins, expected " + std::to_string(F));
  }
  std::vector<double> input(F);
  for (int f = 0; f < F; ++f) {
    const double p = power_spectrum[f];
    if (!(p >= 0.0)) throw ConfigError("encoder: negative or NaN power");
    input[f] = (std::log(p + kLogFloor) - std_mean_[f]) * std_inv_scale_[f];
  }
  std::vector<double> out(2 * L);
  encoder_.Forward(input, out);
  EncoderOutput result;
  result.mean.assign(out.begin(), out.begin() + L);
  result.variance.resize(L);
  for (int l = 0; l < L; ++l) {
    result.variance[l] = std::exp(out[L + l]);
    if (!std::isfinite(result.mean[l]) || !std::isfinite(result.variance[l]) ||
        !(result.variance[l] > 0.0)) {
      throw CorruptWeightsError("encoder produced a non-finite output");
    }
  }
  return result;
}

VaeWeights RandomVae(const RandomVaeOptions& o) {
  if (o.latent_dim < 1 || o.spectrum_dim < 1) throw ConfigError("random vae: dimensions must be positive");
  std::mt19937_64 rng(o.seed);
  auto make_net = [&](int in_dim, int out_dim, bool zero) {
    NetworkWeights net;
    std::vector<int> dims = {in_dim};
    dims.insert(dims.end(), o.hidden.begin(), o.hidden.end());
    dims.push_back(out_dim);
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
      DenseLayer layer;
      layer.in_dim = dims[k];
      layer.out_dim = dims[k + 1];
      layer.activation = k + 2 == dims.size() ? Activation::kIdentity : Activation::kRelu;
      const double limit = o.weight_gain * std::sqrt(6.0 / (layer.in_dim + layer.out_dim));
      std::uniform_real_distribution<double> u(-limit, limit);
      layer.weight.resize(static_cast<std::size_t>(layer.in_dim) * layer.out_dim);
      for (float& v : layer.weight) v = zero ? 0.0f : static_cast<float>(u(rng));
      layer.bias.assign(layer.out_dim, 0.0f);
      net.layers.push_back(std::move(layer));
    }
    return net;
  };
  VaeWeights w;
  w.latent_dim = o.latent_dim;
  w.spectrum_dim = o.spectrum_dim;
  w.decoder = make_net(o.latent_dim, o.spectrum_dim, false);
  for (float& b : w.decoder.layers.back().bias) b = static_cast<float>(o.decoder_output_bias);
  w.encoder = make_net(o.spectrum_dim, 2 * o.latent_dim, o.zero_encoder);
  w.encoder.input_standardization =
      Standardization{std::vector<float>(o.spectrum_dim, 0.0f), std::vector<float>(o.spectrum_dim, 1.0f)};
  return w;
}

}  // namespace mvae
