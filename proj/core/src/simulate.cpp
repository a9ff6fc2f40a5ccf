// core/src/simulate.cpp

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

#include "mvae/simulate.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fft.hpp"
#include "mvae/error.hpp"
#include "mvae/wav.hpp"

namespace mvae {

void MixSpec::Validate() const {
  if (!(std::abs(doa) <= 90.0)) throw ConfigError("doa must lie in [-90, 90] degrees");
  if (!(mic_spacing > 0.0) || !std::isfinite(mic_spacing)) throw ConfigError("mic spacing must be positive");
  if (!(sound_speed > 0.0) || !std::isfinite(sound_speed)) throw ConfigError("sound speed must be positive");
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw ConfigError("snr must be a number or +inf");
  }
}

double MixSpec::DelaySeconds() const {
  return mic_spacing * std::sin(doa * std::numbers::pi / 180.0) / sound_speed;
}

std::vector<double> CircularDelay(std::span<const double> x, double delay) {
  const int m = static_cast<int>(x.size());
  if (m % 2 == 0) throw ConfigError("circular delay needs an odd length");
  if (!std::isfinite(delay)) throw ConfigError("delay must be finite");
  internal::RealFft fft(m);
  std::vector<Complex> spectrum(fft.num_bins());
  fft.Forward(x, spectrum);
  for (int k = 0; k < fft.num_bins(); ++k) {
    const double phase = -2.0 * std::numbers::pi * k * delay / m;
    spectrum[k] *= Complex(std::cos(phase), std::sin(phase));
  }
  std::vector<double> out(m);
  fft.Inverse(spectrum, out);
  for (double& v : out) v /= m;
  return out;
}

std::vector<double> FractionalDelay(std::span<const double> x, double delay) {
  if (x.empty()) return {};
  const std::size_t front = kDelayPadding / 2;
  std::size_t total = x.size() + kDelayPadding;
  if (total % 2 == 0) ++total;
  std::vector<double> padded(total, 0.0);
  std::copy(x.begin(), x.end(), padded.begin() + front);
  const std::vector<double> delayed = CircularDelay(padded, delay);
  return {delayed.begin() + front, delayed.begin() + front + x.size()};
}

Waveform Spatialize(const Waveform& mono, const MixSpec& spec) {
  spec.Validate();
  if (mono.num_channels() != 1) {
    throw ConfigError("spatialize expects mono speech, got " + std::to_string(mono.num_channels()) +
                      " channels");
  }
  Waveform out;
  out.sample_rate = mono.sample_rate;
  out.channels.push_back(mono.channels[0]);
  out.channels.push_back(FractionalDelay(mono.channels[0], spec.DelaySeconds() * mono.sample_rate));
  return out;
}

namespace {

double TotalPower(const Waveform& w) {
  double acc = 0.0;
  for (const auto& ch : w.channels) {
    for (double v : ch) acc += v * v;
  }
  return acc;
}

}  // namespace

Mixture Mix(const Waveform& speech, const Waveform& noise, double snr_db) {
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw ConfigError("snr must be a number or +inf");
  }
  if (speech.num_channels() != noise.num_channels()) {
    throw ConfigError("speech has " + std::to_string(speech.num_channels()) + " channels, noise has " +
                      std::to_string(noise.num_channels()));
  }
  if (speech.sample_rate != noise.sample_rate) throw ConfigError("speech and noise sample rates differ");
  const std::size_t length = speech.num_samples();
  if (length == 0 || noise.num_samples() == 0) throw ConfigError("mix: empty input");

  Mixture out;
  out.speech = speech;
  out.noise.sample_rate = speech.sample_rate;
  out.noise.channels.resize(noise.num_channels());
  for (int i = 0; i < noise.num_channels(); ++i) {
    const auto& src = noise.channels[i];
    auto& dst = out.noise.channels[i];
    dst.resize(length);
    for (std::size_t t = 0; t < length; ++t) dst[t] = src[t % src.size()];
  }
  const double ps = TotalPower(speech);
  const double pn = TotalPower(out.noise);
  if (!(ps > 0.0)) throw ConfigError("mix: speech is silent");
  if (!(pn > 0.0)) throw ConfigError("mix: noise is silent");
  out.noise_gain = std::isinf(snr_db) ? 0.0 : std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
  out.mixture = speech;
  for (int i = 0; i < speech.num_channels(); ++i) {
    for (std::size_t t = 0; t < length; ++t) {
      out.noise.channels[i][t] *= out.noise_gain;
      out.mixture.channels[i][t] += out.noise.channels[i][t];
    }
  }
  return out;
}

MultichannelStft GenerateFromVariances(const Eigen::MatrixXd& variances,
                                       const std::vector<HermitianMatrix>& scms, std::uint64_t seed) {
  const int F = static_cast<int>(variances.rows());
  const int N = static_cast<int>(variances.cols());
  if (static_cast<int>(scms.size()) != F || F < 1) throw ConfigError("generate: need one SCM per bin");
  if (variances.size() > 0 && !(variances.minCoeff() >= 0.0)) {
    throw ConfigError("generate: variances must be non-negative");
  }
  const int I = scms.front().dim();
  std::vector<HermitianMatrix> roots;
  roots.reserve(F);
  for (const HermitianMatrix& r : scms) {
    if (r.dim() != I) throw ConfigError("generate: SCM sizes differ");
    roots.push_back(PsdSqrt(r));
  }
  MultichannelStft out(I, F, N);
  std::mt19937_64 rng(seed);
  // real and imaginary parts each carry half of the unit variance
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexVector c(I);
  for (int n = 0; n < N; ++n) {
    for (int f = 0; f < F; ++f) {
      for (int i = 0; i < I; ++i) {
        const double re = normal(rng);
        c(i) = Complex(re, normal(rng));
      }
      const ComplexVector s = std::sqrt(variances(f, n)) * (roots[f].matrix() * c);
      for (int i = 0; i < I; ++i) out.at(i, f, n) = s(i);
    }
  }
  return out;
}

GeneratedMixture GenerateFromModel(const Vae& vae, const UnsupervisedParams& params, std::uint64_t seed) {
  params.CheckShapes();
  const int F = params.bins();
  const int N = params.frames();
  const int L = vae.latent_dim();
  if (vae.spectrum_dim() != F) throw ConfigError("generate: decoder and parameter bin counts differ");
  GeneratedMixture out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  out.latents.resize(L, N);
  Eigen::MatrixXd speech_var(F, N);
  std::vector<double> z(L);
  for (int n = 0; n < N; ++n) {
    for (int l = 0; l < L; ++l) z[l] = out.latents(l, n) = normal(rng);
    const std::vector<double> v = vae.DecoderForward(z);
    for (int f = 0; f < F; ++f) speech_var(f, n) = params.gain[n] * v[f];
  }
  const std::uint64_t speech_seed = rng();
  const std::uint64_t noise_seed = rng();
  out.speech = GenerateFromVariances(speech_var, params.speech_scm, speech_seed);
  out.noise = GenerateFromVariances(params.noise_dict * params.noise_act, params.noise_scm, noise_seed);
  out.mixture = out.speech;
  auto mix = out.mixture.data();
  const auto noise = out.noise.data();
  for (std::size_t k = 0; k < mix.size(); ++k) mix[k] += noise[k];
  return out;
}

namespace {

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

std::vector<ManifestItem> LoadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_array()) throw ConfigError("manifest must be a JSON list of items");
  if (j.empty()) throw ConfigError("manifest " + path.string() + " is empty");
  const std::filesystem::path base = path.parent_path();
  std::vector<ManifestItem> items;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto& e = j[k];
    const std::string where = "manifest item " + std::to_string(k);
    try {
      ManifestItem item;
      item.speech_path = Resolve(base, e.at("speech_path").get<std::string>());
      item.noise_path = Resolve(base, e.at("noise_path").get<std::string>());
      item.mixture_path = Resolve(base, e.at("mixture_path").get<std::string>());
      item.speech_image_path = Resolve(base, e.at("speech_image_path").get<std::string>());
      item.noise_image_path = Resolve(base, e.at("noise_image_path").get<std::string>());
      if (e.contains("doa")) item.doa = e["doa"].get<double>();
      if (e.contains("noise_channels")) item.noise_channels = e["noise_channels"].get<std::vector<int>>();
      item.spec.snr_db = e.value("snr_db", 0.0);
      item.spec.seed = e.value("seed", std::uint64_t{0});
      item.spec.mic_spacing = e.value("mic_spacing", item.spec.mic_spacing);
      item.spec.sound_speed = e.value("sound_speed", item.spec.sound_speed);
      if (item.doa) item.spec.doa = *item.doa;
      item.spec.Validate();
      if (item.noise_channels.size() != 2) throw ConfigError("noise_channels must list two channels");
      items.push_back(std::move(item));
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(where + ": " + ex.what());
    } catch (const ConfigError& ex) {
      throw ConfigError(where + ": " + ex.what());
    }
  }
  return items;
}

double SimulateItem(const ManifestItem& item) {
  MixSpec spec = item.spec;
  if (!item.doa) {
    std::mt19937_64 rng(spec.seed);
    spec.doa = std::uniform_real_distribution<double>(-90.0, 90.0)(rng);
  }
  const Waveform speech = ReadWav(item.speech_path);
  const Waveform noise_all = ReadWav(item.noise_path);
  if (speech.num_channels() != 1) {
    throw ConfigError(item.speech_path.string() + ": speech must be mono");
  }
  Waveform noise;
  noise.sample_rate = noise_all.sample_rate;
  for (int c : item.noise_channels) {
    if (c < 0 || c >= noise_all.num_channels()) {
      throw ConfigError(item.noise_path.string() + ": has no channel " + std::to_string(c));
    }
    noise.channels.push_back(noise_all.channels[c]);
  }
  const Mixture m = Mix(Spatialize(speech, spec), noise, spec.snr_db);
  for (const auto& p : {item.mixture_path, item.speech_image_path, item.noise_image_path}) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  }
  WriteWav(item.mixture_path, m.mixture);
  WriteWav(item.speech_image_path, m.speech);
  WriteWav(item.noise_image_path, m.noise);
  return spec.doa;
}

}  // namespace mvae
