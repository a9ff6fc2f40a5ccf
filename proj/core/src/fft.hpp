// core/src/fft.hpp

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

#ifndef MVAE_SRC_FFT_HPP_
#define MVAE_SRC_FFT_HPP_

#include <complex>
#include <memory>
#include <span>

namespace mvae::internal {

// Unnormalized real <-> half-spectrum transform of a fixed length backed by
// FFTW. Plan creation is serialized; Forward/Inverse on distinct instances
// may run concurrently.
class RealFft {
 public:
  explicit RealFft(int length);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int length() const { return length_; }
  int num_bins() const { return length_ / 2 + 1; }

  // in: length samples; out: num_bins values.
  void Forward(std::span<const double> in, std::span<std::complex<double>> out);
  // in: num_bins values; out: length samples, scaled by length (unnormalized).
  void Inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Impl;
  int length_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mvae::internal

#endif  // MVAE_SRC_FFT_HPP_
