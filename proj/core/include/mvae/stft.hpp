// core/include/mvae/stft.hpp

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

#ifndef MVAE_STFT_HPP_
#define MVAE_STFT_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "mvae/hermitian.hpp"

namespace mvae {

struct StftConfig {
  int sample_rate = 16000;
  int window_length = 1024;  // 64 ms at 16 kHz
  int hop = 256;             // 75% overlap

  int fft_size() const { return window_length; }
  int num_bins() const { return fft_size() / 2 + 1; }
  // Zeros prepended (and at least appended) so every sample sees
  // window_length / hop frames.
  int edge_padding() const { return window_length - hop; }

  // Throws ConfigError unless hop divides window_length with at least two
  // frames overlapping every sample.
  void Validate() const;
};

// Sine analysis/synthesis window, w[t] = sin(pi (t + 0.5) / length).
std::vector<double> SineWindow(int length);

// channels x samples, values nominally in [-1, 1).
struct Waveform {
  int sample_rate = 16000;
  std::vector<std::vector<double>> channels;

  int num_channels() const { return static_cast<int>(channels.size()); }
  std::size_t num_samples() const { return channels.empty() ? 0 : channels.front().size(); }
};

// Complex STFT tensor indexed (channel i, bin f, frame n). The I channel
// values of one bin are contiguous so x_fn can be handed out as a span.
class MultichannelStft {
 public:
  MultichannelStft() = default;
  MultichannelStft(int channels, int bins, int frames, std::size_t signal_length = 0);

  int channels() const { return channels_; }
  int bins() const { return bins_; }
  int frames() const { return frames_; }
  // Length of the waveform this was computed from (0 if unknown).
  std::size_t signal_length() const { return signal_length_; }
  void set_signal_length(std::size_t n) { signal_length_ = n; }

  Complex& at(int i, int f, int n) { return data_[Offset(f, n) + i]; }
  const Complex& at(int i, int f, int n) const { return data_[Offset(f, n) + i]; }

  std::span<Complex> bin(int f, int n) {
    return {data_.data() + Offset(f, n), static_cast<std::size_t>(channels_)};
  }
  std::span<const Complex> bin(int f, int n) const {
    return {data_.data() + Offset(f, n), static_cast<std::size_t>(channels_)};
  }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

 private:
  std::size_t Offset(int f, int n) const {
    return (static_cast<std::size_t>(n) * bins_ + f) * channels_;
  }

  int channels_ = 0;
  int bins_ = 0;
  int frames_ = 0;
  std::size_t signal_length_ = 0;
  std::vector<Complex> data_;
};

// Windowed FFT of every channel. Throws ConfigError for empty or non-finite
// input.
MultichannelStft Analyze(const Waveform& signal, const StftConfig& cfg);

// Weighted overlap-add inverse of Analyze; the result has
// spec.signal_length() samples per channel (or the full unpadded span when
// that is unknown).
Waveform Synthesize(const MultichannelStft& spec, const StftConfig& cfg);

// |x_{i,fn}|^2 averaged over channels, row-major F x N.
std::vector<double> ChannelMeanPower(const MultichannelStft& x);

}  // namespace mvae

#endif  // MVAE_STFT_HPP_
