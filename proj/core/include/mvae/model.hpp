// core/include/mvae/model.hpp

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

#ifndef MVAE_MODEL_HPP_
#define MVAE_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mvae/hermitian.hpp"
#include "mvae/stft.hpp"

namespace mvae {

class Vae;

// Lower bound applied to NMF entries (and gains) after every multiplicative
// update; multiplicative updates cannot leave zero.
inline constexpr double kNmfFloor = 1e-10;

// Parameters estimated from the noisy observation: noise NMF, speech and
// noise spatial covariance matrices, per-frame speech gains.
struct UnsupervisedParams {
  Eigen::MatrixXd noise_dict;   // W_b, F x K_b
  Eigen::MatrixXd noise_act;    // H_b, K_b x N
  std::vector<HermitianMatrix> speech_scm;  // R_s,f
  std::vector<HermitianMatrix> noise_scm;   // R_b,f
  std::vector<double> gain;     // g_n

  int bins() const { return static_cast<int>(noise_dict.rows()); }
  int frames() const { return static_cast<int>(noise_act.cols()); }
  int rank() const { return static_cast<int>(noise_dict.cols()); }
  int channels() const { return speech_scm.empty() ? 0 : speech_scm.front().dim(); }

  // (W_b H_b)_{f,n}
  double NoiseVariance(int f, int n) const { return noise_dict.row(f).dot(noise_act.col(n)); }

  // Throws ConfigError on inconsistent shapes.
  void CheckShapes() const;
};

// W_b, H_b ~ uniform(0.1, 1.0) from `seed`, identity SCMs, unit gains.
UnsupervisedParams InitialParams(int bins, int frames, int rank, int channels, std::uint64_t seed);

// g_n sigma_f^2 R_s,f + (W_b H_b)_{f,n} R_b,f, given the decoder variance
// sigma_f^2(z_n) for this bin.
HermitianMatrix SigmaX(const UnsupervisedParams& p, double speech_variance, int f, int n);

// Same, with every frame variance of one latent sample: variances has F
// entries.
HermitianMatrix SigmaX(const UnsupervisedParams& p, std::span<const double> speech_variances,
                       int f, int n);

// Complex proper Gaussian log-density:
//   -I ln(pi) - ln det(sigma) - x^H sigma^{-1} x.
// Throws SingularMatrixError for a non-PD sigma.
double LogLikelihood(std::span<const Complex> x, const HermitianMatrix& sigma);

// Both ingredients of the Gaussian density: ln det(sigma) and
// x^H sigma^{-1} x. Closed form for I <= 2.
struct DensityTerms {
  double log_det;
  double quad;
};
DensityTerms GaussianTerms(std::span<const Complex> x, const HermitianMatrix& sigma);

// Scales R_b,f to unit trace (rows of W_b absorb the factor), then W_b
// columns to unit sum (rows of H_b absorb it). Sigma_x is unchanged.
UnsupervisedParams Normalize(UnsupervisedParams p);

// JSON checkpoint; complex entries are [re, im] pairs.
std::string ParamsToJson(const UnsupervisedParams& p);
UnsupervisedParams ParamsFromJson(const std::string& json);
void SaveParams(const UnsupervisedParams& p, const std::filesystem::path& path);
UnsupervisedParams LoadParams(const std::filesystem::path& path);

// Metropolis-Hastings state for every frame plus the last R kept samples.
class LatentChain {
 public:
  LatentChain() = default;
  LatentChain(int frames, int latent_dim);

  int frames() const { return frames_; }
  int latent_dim() const { return latent_dim_; }
  int kept() const { return kept_; }

  std::span<double> state(int n) { return {state_.data() + Index(n), Dim()}; }
  std::span<const double> state(int n) const { return {state_.data() + Index(n), Dim()}; }
  std::span<const double> sample(int r, int n) const {
    return {samples_.data() + static_cast<std::size_t>(r) * state_.size() + Index(n), Dim()};
  }

  // Drops the kept samples and reserves room for `count` new ones.
  void ResetSamples(int count);
  // Copies the current state of every frame into kept slot r.
  void StoreSample(int r);

  // Cached log p(z_n) + sum_f log p(x_fn | z_n) of the current state,
  // valid only for the parameters it was computed with.
  std::vector<double>& log_target() { return log_target_; }
  const std::vector<double>& log_target() const { return log_target_; }

  double acceptance_rate() const { return acceptance_rate_; }
  void set_acceptance_rate(double r) { acceptance_rate_ = r; }

 private:
  std::size_t Index(int n) const { return static_cast<std::size_t>(n) * latent_dim_; }
  std::size_t Dim() const { return static_cast<std::size_t>(latent_dim_); }

  int frames_ = 0;
  int latent_dim_ = 0;
  int kept_ = 0;
  std::vector<double> state_;
  std::vector<double> samples_;
  std::vector<double> log_target_;
  double acceptance_rate_ = 0.0;
};

// sigma_f^2(z_n^{(r)}) for every kept sample, frame and bin.
class SpeechVariances {
 public:
  SpeechVariances() = default;
  SpeechVariances(int samples, int frames, int bins, double fill = 0.0);

  int samples() const { return samples_; }
  int frames() const { return frames_; }
  int bins() const { return bins_; }

  std::span<double> at(int r, int n) { return {data_.data() + Index(r, n), Bins()}; }
  std::span<const double> at(int r, int n) const { return {data_.data() + Index(r, n), Bins()}; }
  double operator()(int r, int f, int n) const { return data_[Index(r, n) + f]; }

 private:
  std::size_t Index(int r, int n) const {
    return (static_cast<std::size_t>(r) * frames_ + n) * bins_;
  }
  std::size_t Bins() const { return static_cast<std::size_t>(bins_); }

  int samples_ = 0;
  int frames_ = 0;
  int bins_ = 0;
  std::vector<double> data_;
};

// Evaluates the decoder on every kept sample of the chain.
SpeechVariances DecodeSamples(const Vae& vae, const LatentChain& chain);

}  // namespace mvae

#endif  // MVAE_MODEL_HPP_
