// core/include/mvae/simulate.hpp

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

#ifndef MVAE_SIMULATE_HPP_
#define MVAE_SIMULATE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mvae/model.hpp"
#include "mvae/nn.hpp"
#include "mvae/stft.hpp"

namespace mvae {

// Free-field two-microphone geometry and mixing level.
struct MixSpec {
  double doa = 0.0;           // degrees, [-90, 90]
  double mic_spacing = 0.05;  // meters
  double sound_speed = 343.0;  // m/s
  double snr_db = 0.0;         // +inf means no noise
  std::uint64_t seed = 0;

  void Validate() const;
  // Inter-microphone delay mic_spacing * sin(doa) / sound_speed.
  double DelaySeconds() const;
};

// Zero padding added around the signal before the frequency-domain delay.
inline constexpr int kDelayPadding = 512;

// Circular delay of x by `delay` samples (any real value) via the phase ramp
// exp(-j 2 pi k delay / M); M = x.size() must be odd so every bin has a
// conjugate partner. Unitary: the energy of x is preserved.
std::vector<double> CircularDelay(std::span<const double> x, double delay);

// Linear fractional delay: the signal is padded with kDelayPadding zeros
// (rounded to an odd length), circularly delayed, then cropped back to
// x.size() samples.
std::vector<double> FractionalDelay(std::span<const double> x, double delay);

// Channel 0 = speech, channel 1 = speech delayed by spec.DelaySeconds().
Waveform Spatialize(const Waveform& mono, const MixSpec& spec);

struct Mixture {
  Waveform mixture;
  Waveform speech;  // unchanged speech image
  Waveform noise;   // scaled noise image; mixture = speech + noise
  double noise_gain = 0.0;
};

// Crops or loops the noise to the speech length and scales it so that the
// total speech power over noise power equals snr_db. Throws ConfigError for
// silent inputs or mismatched channel counts / sample rates.
Mixture Mix(const Waveform& speech, const Waveform& noise, double snr_db);

// STFT draws of s_fn ~ N_c(0, v_fn R_f) with v given as an F x N matrix and
// one SCM per bin; the RNG is consumed in (n, f) order.
MultichannelStft GenerateFromVariances(const Eigen::MatrixXd& variances,
                                       const std::vector<HermitianMatrix>& scms, std::uint64_t seed);

struct GeneratedMixture {
  Eigen::MatrixXd latents;     // L x N, z_n ~ N(0, I)
  MultichannelStft speech;     // sqrt(g_n) s_fn
  MultichannelStft noise;      // b_fn
  MultichannelStft mixture;    // speech + noise
};

// Samples the generative model forward with the decoder of `vae` and the
// noise model, SCMs and gains of `params` (which fix F, N and I).
GeneratedMixture GenerateFromModel(const Vae& vae, const UnsupervisedParams& params, std::uint64_t seed);

// One entry of a simulation manifest. Relative paths are resolved against
// the manifest's directory.
struct ManifestItem {
  std::filesystem::path speech_path;
  std::filesystem::path noise_path;
  std::filesystem::path mixture_path;
  std::filesystem::path speech_image_path;
  std::filesystem::path noise_image_path;
  std::optional<double> doa;  // drawn uniformly from [-90, 90] when absent
  std::vector<int> noise_channels = {0, 1};
  MixSpec spec;
};

// Parses a JSON list of items. Throws ConfigError for an empty list or
// invalid fields, IoError/FormatError for unreadable files.
std::vector<ManifestItem> LoadManifest(const std::filesystem::path& path);

// Reads the inputs of one item, spatializes, mixes and writes the three
// outputs. Returns the DOA that was used.
double SimulateItem(const ManifestItem& item);

}  // namespace mvae

#endif  // MVAE_SIMULATE_HPP_
