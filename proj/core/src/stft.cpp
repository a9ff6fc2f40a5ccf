// core/src/stft.cpp

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

#include "mvae/stft.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "mvae/error.hpp"

namespace mvae {

void StftConfig::Validate() const {
  if (sample_rate <= 0) throw ConfigError("sample rate must be positive");
  if (window_length < 2 || hop < 1) throw ConfigError("window length and hop must be positive");
  if (window_length % hop != 0) {
    throw ConfigError("hop " + std::to_string(hop) + " does not divide window length " +
                      std::to_string(window_length));
  }
  if (window_length / hop < 2) {
    throw ConfigError("window length / hop must be at least 2 for a constant overlap sum");
  }
}

std::vector<double> SineWindow(int length) {
  std::vector<double> w(length);
  for (int t = 0; t < length; ++t) {
    w[t] = std::sin(std::numbers::pi * (t + 0.5) / length);
  }
  return w;
}

MultichannelStft::MultichannelStft(int channels, int bins, int frames, std::size_t signal_length)
    : channels_(channels), bins_(bins), frames_(frames), signal_length_(signal_length) {
  if (channels < 1 || channels > kMaxChannels) {
    throw ConfigError("channel count " + std::to_string(channels) + " outside [1, " +
                      std::to_string(kMaxChannels) + "]");
  }
  if (bins < 1 || frames < 0) throw ConfigError("invalid STFT dimensions");
  data_.assign(static_cast<std::size_t>(channels) * bins * frames, Complex(0.0, 0.0));
}

MultichannelStft Analyze(const Waveform& signal, const StftConfig& cfg) {
  cfg.Validate();
  if (signal.channels.empty() || signal.num_samples() == 0) {
    throw ConfigError("analyze: empty signal");
  }
  const std::size_t length = signal.num_samples();
  for (const auto& ch : signal.channels) {
    if (ch.size() != length) throw ConfigError("analyze: channels differ in length");
    for (double v : ch) {
      if (!std::isfinite(v)) throw ConfigError("analyze: non-finite sample");
    }
  }

  const int win = cfg.window_length;
  const int hop = cfg.hop;
  const std::size_t pad = cfg.edge_padding();
  const int frames = static_cast<int>((pad + length - 1) / hop) + 1;
  const int bins = cfg.num_bins();
  const std::vector<double> window = SineWindow(win);

  MultichannelStft out(signal.num_channels(), bins, frames, length);
  internal::RealFft fft(cfg.fft_size());
  std::vector<double> frame(win);
  std::vector<Complex> spectrum(bins);
  for (int i = 0; i < signal.num_channels(); ++i) {
    const auto& x = signal.channels[i];
    for (int n = 0; n < frames; ++n) {
      const std::size_t start = static_cast<std::size_t>(n) * hop;
      for (int t = 0; t < win; ++t) {
        // position in the unpadded signal
        const std::size_t p = start + t;
        const double v = (p >= pad && p - pad < length) ? x[p - pad] : 0.0;
        frame[t] = v * window[t];
      }
      fft.Forward(frame, spectrum);
      for (int f = 0; f < bins; ++f) out.at(i, f, n) = spectrum[f];
    }
  }
  return out;
}

Waveform Synthesize(const MultichannelStft& spec, const StftConfig& cfg) {
  cfg.Validate();
  if (spec.bins() != cfg.num_bins()) {
    throw ConfigError("synthesize: STFT has " + std::to_string(spec.bins()) +
                      " bins, configuration expects " + std::to_string(cfg.num_bins()));
  }
  const int win = cfg.window_length;
  const int hop = cfg.hop;
  const std::size_t pad = cfg.edge_padding();
  const int frames = spec.frames();
  const std::size_t padded = frames == 0 ? 0 : static_cast<std::size_t>(frames - 1) * hop + win;
  std::size_t length = spec.signal_length();
  if (length == 0) length = padded > 2 * pad ? padded - 2 * pad : 0;
  if (length + pad > padded) {
    throw ConfigError("synthesize: " + std::to_string(frames) + " frames cannot cover " +
                      std::to_string(length) + " samples");
  }

  const std::vector<double> window = SineWindow(win);
  double overlap_sum = 0.0;
  for (int t = 0; t < win; t += hop) overlap_sum += window[t] * window[t];

  Waveform out;
  out.sample_rate = cfg.sample_rate;
  out.channels.assign(spec.channels(), std::vector<double>(length, 0.0));
  internal::RealFft fft(cfg.fft_size());
  std::vector<Complex> spectrum(spec.bins());
  std::vector<double> frame(win);
  std::vector<double> acc(padded);
  const double scale = 1.0 / (static_cast<double>(win) * overlap_sum);
  for (int i = 0; i < spec.channels(); ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int n = 0; n < frames; ++n) {
      for (int f = 0; f < spec.bins(); ++f) spectrum[f] = spec.at(i, f, n);
      fft.Inverse(spectrum, frame);
      const std::size_t start = static_cast<std::size_t>(n) * hop;
      for (int t = 0; t < win; ++t) acc[start + t] += frame[t] * window[t];
    }
    for (std::size_t p = 0; p < length; ++p) out.channels[i][p] = acc[p + pad] * scale;
  }
  return out;
}

std::vector<double> ChannelMeanPower(const MultichannelStft& x) {
  const int F = x.bins();
  const int N = x.frames();
  std::vector<double> power(static_cast<std::size_t>(F) * N, 0.0);
  for (int n = 0; n < N; ++n) {
    for (int f = 0; f < F; ++f) {
      double acc = 0.0;
      for (const Complex& v : x.bin(f, n)) acc += std::norm(v);
      power[static_cast<std::size_t>(f) * N + n] = acc / x.channels();
    }
  }
  return power;
}

}  // namespace mvae
