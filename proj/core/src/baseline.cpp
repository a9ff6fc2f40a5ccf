// core/src/baseline.cpp

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

#include "mvae/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "container.hpp"
#include "kernels.hpp"
#include "mvae/error.hpp"
#include "mvae/mcem.hpp"
#include "parallel.hpp"

namespace mvae {

namespace {

constexpr const char* kDictionaryType = "nmf_dictionary";
constexpr const char* kDictionaryTensor = "speech_dict";

void NormalizeColumns(Eigen::MatrixXd& w, Eigen::MatrixXd& h) {
  for (Eigen::Index k = 0; k < w.cols(); ++k) {
    const double s = w.col(k).sum();
    w.col(k) /= s;
    h.row(k) *= s;
  }
}

Eigen::MatrixXd UniformMatrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  }
  return m;
}

}  // namespace

void SaveSpeechDictionary(const SpeechDictionary& dict, const std::filesystem::path& path) {
  if (dict.bins() < 1 || dict.rank() < 1) throw ConfigError("cannot save an empty dictionary");
  internal::Container c;
  c.manifest = {{"type", kDictionaryType}, {"spectrum_dim", dict.bins()}, {"rank", dict.rank()}};
  internal::Tensor t;
  t.name = kDictionaryTensor;
  t.shape = {static_cast<std::size_t>(dict.bins()), static_cast<std::size_t>(dict.rank())};
  t.values.reserve(dict.bins() * dict.rank());
  for (int f = 0; f < dict.bins(); ++f) {
    for (int k = 0; k < dict.rank(); ++k) t.values.push_back(static_cast<float>(dict.basis(f, k)));
  }
  c.tensors.push_back(std::move(t));
  internal::WriteContainer(path, c);
}

SpeechDictionary LoadSpeechDictionary(const std::filesystem::path& path) {
  const internal::Container c = internal::ReadContainer(path);
  int bins = 0;
  int rank = 0;
  try {
    const std::string type = c.manifest.at("type").get<std::string>();
    if (type != kDictionaryType) {
      throw FormatError(path.string() + ": container type is '" + type + "', expected '" +
                        kDictionaryType + "'");
    }
    bins = c.manifest.at("spectrum_dim").get<int>();
    rank = c.manifest.at("rank").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": malformed dictionary manifest: " + e.what());
  }
  if (c.tensors.size() != 1 || c.tensors[0].name != kDictionaryTensor || bins < 1 || rank < 1 ||
      c.tensors[0].shape != std::vector<std::size_t>{static_cast<std::size_t>(bins),
                                                     static_cast<std::size_t>(rank)}) {
    throw FormatError(path.string() + ": dictionary tensor missing or misshapen");
  }
  SpeechDictionary dict;
  dict.basis.resize(bins, rank);
  const auto& v = c.tensors[0].values;
  for (int f = 0; f < bins; ++f) {
    for (int k = 0; k < rank; ++k) {
      const double x = v[static_cast<std::size_t>(f) * rank + k];
      if (x < 0.0) throw CorruptWeightsError(path.string() + ": negative dictionary entry");
      dict.basis(f, k) = x;
    }
  }
  return dict;
}

double ItakuraSaito(const Eigen::MatrixXd& v, const Eigen::MatrixXd& model) {
  if (v.rows() != model.rows() || v.cols() != model.cols()) {
    throw ConfigError("itakura-saito: shape mismatch");
  }
  double acc = 0.0;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double q = v(i, j) / model(i, j);
      acc += q - std::log(q) - 1.0;
    }
  }
  return acc;
}

PretrainResult PretrainDictionary(const Eigen::MatrixXd& power, const PretrainConfig& cfg) {
  if (power.size() == 0) throw ConfigError("pretrain: empty corpus");
  if (cfg.rank < 1) throw ConfigError("pretrain: rank must be positive");
  if (cfg.max_iterations < 0) throw ConfigError("pretrain: negative iteration count");
  if (!power.allFinite() || power.minCoeff() < 0.0) {
    throw ConfigError("pretrain: power spectra must be finite and non-negative");
  }
  const Eigen::MatrixXd v = power.cwiseMax(kNmfFloor);
  std::mt19937_64 rng(cfg.seed);
  Eigen::MatrixXd w = UniformMatrix(v.rows(), cfg.rank, rng);
  Eigen::MatrixXd h = UniformMatrix(cfg.rank, v.cols(), rng);
  // Start at the data scale so the first updates are not spent on it.
  h *= v.mean() / (w * h).mean();

  PretrainResult out;
  Eigen::MatrixXd model = w * h;
  out.cost_history.push_back(ItakuraSaito(v, model));
  for (int it = 0; it < cfg.max_iterations; ++it) {
    // Exponent 1/2 makes both steps majorization-minimization, hence
    // monotone.
    Eigen::MatrixXd inv = model.cwiseInverse();
    Eigen::MatrixXd weighted = v.cwiseProduct(inv).cwiseProduct(inv);
    h = h.cwiseProduct(((w.transpose() * weighted).cwiseQuotient(w.transpose() * inv)).cwiseSqrt())
            .cwiseMax(kNmfFloor);
    model = w * h;
    inv = model.cwiseInverse();
    weighted = v.cwiseProduct(inv).cwiseProduct(inv);
    w = w.cwiseProduct(((weighted * h.transpose()).cwiseQuotient(inv * h.transpose())).cwiseSqrt())
            .cwiseMax(kNmfFloor);
    NormalizeColumns(w, h);
    model = w * h;
    const double cost = ItakuraSaito(v, model);
    const double previous = out.cost_history.back();
    out.cost_history.push_back(cost);
    if (std::abs(previous - cost) <= cfg.tolerance * std::abs(previous)) break;
  }
  NormalizeColumns(w, h);
  out.dict.basis = std::move(w);
  out.activations = std::move(h);
  return out;
}

void BaselineConfig::Validate() const {
  if (iterations < 0) throw ConfigError("baseline: negative iteration count");
  if (noise_rank < 1) throw ConfigError("baseline: noise rank must be positive");
}

BaselineParams InitialBaselineParams(const MultichannelStft& x, const SpeechDictionary& dict,
                                     const BaselineConfig& cfg) {
  cfg.Validate();
  if (dict.bins() != x.bins()) {
    throw ConfigError("dictionary has " + std::to_string(dict.bins()) +
                      " frequency bins but the mixture has " + std::to_string(x.bins()));
  }
  BaselineParams p;
  p.model = InitialParams(x.bins(), x.frames(), cfg.noise_rank, x.channels(), cfg.seed);
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    3u};
  std::mt19937_64 rng(seq);
  p.speech_act = UniformMatrix(dict.rank(), x.frames(), rng);
  return p;
}

SpeechVariances BaselineSpeechVariances(const SpeechDictionary& dict, const Eigen::MatrixXd& speech_act) {
  if (speech_act.rows() != dict.rank()) throw ConfigError("baseline: H_s rank differs from dictionary");
  const int N = static_cast<int>(speech_act.cols());
  const Eigen::MatrixXd v = dict.basis * speech_act;
  SpeechVariances out(1, N, dict.bins());
  for (int n = 0; n < N; ++n) {
    auto col = out.at(0, n);
    for (int f = 0; f < dict.bins(); ++f) col[f] = v(f, n);
  }
  return out;
}

double BaselineCost(const MultichannelStft& x, const SpeechDictionary& dict, const BaselineParams& p) {
  return Cost(x, p.model, BaselineSpeechVariances(dict, p.speech_act));
}

void UpdateSpeechAct(const MultichannelStft& x, const SpeechDictionary& dict, BaselineParams& p) {
  const UnsupervisedParams& m = p.model;
  if (x.bins() != m.bins() || x.frames() != m.frames() || x.channels() != m.channels() ||
      dict.bins() != x.bins() || p.speech_act.rows() != dict.rank() || p.speech_act.cols() != x.frames()) {
    throw ConfigError("baseline: shapes of observation, dictionary and parameters differ");
  }
  const int F = x.bins();
  const int N = x.frames();
  const int I = x.channels();
  const Eigen::MatrixXd speech_var = dict.basis * p.speech_act;
  const Eigen::MatrixXd noise_var = m.noise_dict * m.noise_act;
  Eigen::MatrixXd num(F, N);
  Eigen::MatrixXd den(F, N);
  internal::DispatchChannels(I, [&](auto c) {
    constexpr int kI = decltype(c)::value;
    std::vector<internal::Mat<kI>> rs;
    std::vector<internal::Mat<kI>> rb;
    for (int f = 0; f < F; ++f) {
      rs.push_back(internal::Load<kI>(m.speech_scm[f]));
      rb.push_back(internal::Load<kI>(m.noise_scm[f]));
    }
    internal::ParallelFor(N, [&](int n) {
      for (int f = 0; f < F; ++f) {
        const internal::Mat<kI> inv = internal::InverseOf<kI>(
            (m.gain[n] * speech_var(f, n)) * rs[f] + noise_var(f, n) * rb[f], true);
        const internal::Vec<kI> y = inv * internal::Load<kI>(x.bin(f, n));
        num(f, n) = internal::Quad<kI>(rs[f], y);
        den(f, n) = internal::TraceOfProduct<kI>(inv, rs[f]);
      }
    });
  });
  const Eigen::MatrixXd a = dict.basis.transpose() * num;
  const Eigen::MatrixXd b = dict.basis.transpose() * den;
  for (Eigen::Index k = 0; k < p.speech_act.rows(); ++k) {
    for (Eigen::Index n = 0; n < N; ++n) {
      if (!(b(k, n) > 0.0)) throw NumericalError("baseline: non-positive denominator in H_s update");
      p.speech_act(k, n) =
          std::max(kNmfFloor, p.speech_act(k, n) * std::sqrt(std::max(a(k, n), 0.0) / b(k, n)));
    }
  }
}

void BaselineIteration(const MultichannelStft& x, const SpeechDictionary& dict, BaselineParams& p) {
  UpdateSpeechAct(x, dict, p);
  const SpeechVariances v = BaselineSpeechVariances(dict, p.speech_act);
  UpdateNoiseDict(x, p.model, v);
  UpdateNoiseAct(x, p.model, v);
  UpdateSpeechScm(x, p.model, v);
  UpdateNoiseScm(x, p.model, v);
  p.model = Normalize(std::move(p.model));
}

BaselineResult RunBaseline(const MultichannelStft& x, const SpeechDictionary& dict,
                           const BaselineConfig& cfg, const StftConfig& stft,
                           const BaselineProgressFn& progress) {
  BaselineResult result;
  result.params = InitialBaselineParams(x, dict, cfg);
  for (int it = 1; it <= cfg.iterations; ++it) {
    BaselineIteration(x, dict, result.params);
    BaselineRecord record{it, BaselineCost(x, dict, result.params)};
    result.history.push_back(record);
    if (progress) progress(record);
  }
  ApplyAveragedWiener(x, result.params.model, BaselineSpeechVariances(dict, result.params.speech_act),
                      result.images.speech_stft, result.images.noise_stft);
  SynthesizeImages(result.images, stft);
  return result;
}

}  // namespace mvae
