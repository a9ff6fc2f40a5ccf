// core/src/fft.cpp

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

#include "fft.hpp"

#include <algorithm>
#include <mutex>

#include <fftw3.h>

#include "mvae/error.hpp"

namespace mvae::internal {

namespace {
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace

struct RealFft::Impl {
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

RealFft::RealFft(int length) : length_(length), impl_(std::make_unique<Impl>()) {
  if (length < 1) throw ConfigError("fft length must be positive");
  std::lock_guard<std::mutex> lock(PlannerMutex());
  impl_->real = fftw_alloc_real(length);
  impl_->spectrum = fftw_alloc_complex(length / 2 + 1);
  impl_->forward = fftw_plan_dft_r2c_1d(length, impl_->real, impl_->spectrum, FFTW_ESTIMATE);
  impl_->inverse = fftw_plan_dft_c2r_1d(length, impl_->spectrum, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(impl_->forward);
  fftw_destroy_plan(impl_->inverse);
  fftw_free(impl_->real);
  fftw_free(impl_->spectrum);
}

void RealFft::Forward(std::span<const double> in, std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.begin() + length_, impl_->real);
  fftw_execute(impl_->forward);
  for (int k = 0; k < num_bins(); ++k) {
    out[k] = {impl_->spectrum[k][0], impl_->spectrum[k][1]};
  }
}

void RealFft::Inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  // c2r overwrites its input, so the working buffer is refilled every call.
  for (int k = 0; k < num_bins(); ++k) {
    impl_->spectrum[k][0] = in[k].real();
    impl_->spectrum[k][1] = in[k].imag();
  }
  fftw_execute(impl_->inverse);
  std::copy(impl_->real, impl_->real + length_, out.begin());
}

}  // namespace mvae::internal
