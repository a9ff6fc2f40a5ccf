// core/include/mvae/mcem.hpp

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

#ifndef MVAE_MCEM_HPP_
#define MVAE_MCEM_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mvae/model.hpp"
#include "mvae/nn.hpp"
#include "mvae/stft.hpp"

namespace mvae {

// Random-walk Metropolis-Hastings schedule.
struct SamplerConfig {
  int iterations = 40;
  int burn_in = 30;
  double proposal_variance = 0.01;  // epsilon^2

  int kept() const { return iterations - burn_in; }
  void Validate() const;
};

struct McemConfig {
  int em_iterations = 50;
  SamplerConfig sampler;
  int noise_rank = 10;  // K_b
  std::uint64_t seed = 0;

  void Validate() const;
};

// One independent generator per frame, seeded from (seed, stream, n), so
// sampling results do not depend on how frames are spread over threads.
class FrameRngs {
 public:
  FrameRngs(std::uint64_t seed, std::uint64_t stream, int frames);

  std::mt19937_64& operator[](int n) { return engines_[n]; }
  int size() const { return static_cast<int>(engines_.size()); }

 private:
  std::vector<std::mt19937_64> engines_;
};

// Stream identifiers for FrameRngs.
inline constexpr std::uint64_t kInferenceStream = 1;
inline constexpr std::uint64_t kReconstructionStream = 2;

// ln N(z; 0, I).
double LatentLogPrior(std::span<const double> z);

// sum_f ln p(x_fn | z_n) with the decoder variances sigma_f^2(z_n) given.
// Returns -inf when some Sigma_x,fn is not PD.
double FrameLogLikelihood(const MultichannelStft& x, const UnsupervisedParams& params, int n,
                          std::span<const double> speech_variances);

// ln p(z) + sum_f ln p(x_fn | z): the (unnormalized) log posterior the
// sampler targets.
double FrameLogTarget(const MultichannelStft& x, const UnsupervisedParams& params, const Vae& vae,
                      int n, std::span<const double> z);

// ln alpha = min(0, proposal - current); -inf when the proposal has zero
// density.
double LogAcceptance(double current_log_target, double proposal_log_target);

// Recomputes the cached log target of every frame's current state.
void RefreshLogTargets(LatentChain& chain, const MultichannelStft& x,
                       const UnsupervisedParams& params, const Vae& vae);

// One random-walk MH move for every frame, independently. Requires cached
// log targets consistent with `params` (see RefreshLogTargets). Returns the
// number of accepted proposals.
int MhStep(LatentChain& chain, const MultichannelStft& x, const UnsupervisedParams& params,
           const Vae& vae, FrameRngs& rngs, double proposal_variance);

// Runs cfg.iterations MH moves from the chain's current state and keeps the
// last cfg.kept() states. The final state is left in the chain.
LatentChain EStep(const MultichannelStft& x, const UnsupervisedParams& params, const Vae& vae,
                  LatentChain chain, const SamplerConfig& cfg, FrameRngs& rngs);

// z_n ~ N(mu(p_n), diag(var(p_n))) where p_n is the channel-averaged power
// spectrum of the mixture.
LatentChain InitializeChain(const MultichannelStft& x, const Vae& vae, FrameRngs& rngs);

// C(theta_u) = sum_r sum_{f,n} [ x^H Sigma_x^{-1} x + ln det Sigma_x ].
double Cost(const MultichannelStft& x, const UnsupervisedParams& params,
            const SpeechVariances& variances);

// -C / R: the Monte Carlo estimate of the EM auxiliary function, up to an
// additive constant.
double QTilde(const MultichannelStft& x, const UnsupervisedParams& params,
              const SpeechVariances& variances);
double QTilde(const MultichannelStft& x, const UnsupervisedParams& params, const Vae& vae,
              const LatentChain& chain);

// Majorization-minimization updates. Each one recomputes Sigma_x from the
// current parameters and cannot increase Cost on the fixed sample set.
void UpdateNoiseDict(const MultichannelStft& x, UnsupervisedParams& params,
                     const SpeechVariances& variances);
void UpdateNoiseAct(const MultichannelStft& x, UnsupervisedParams& params,
                    const SpeechVariances& variances);
void UpdateGain(const MultichannelStft& x, UnsupervisedParams& params,
                const SpeechVariances& variances);
void UpdateSpeechScm(const MultichannelStft& x, UnsupervisedParams& params,
                     const SpeechVariances& variances);
void UpdateNoiseScm(const MultichannelStft& x, UnsupervisedParams& params,
                    const SpeechVariances& variances);

// W_b, H_b, g, R_s, R_b in that order, then Normalize.
UnsupervisedParams MStep(const MultichannelStft& x, UnsupervisedParams params,
                         const SpeechVariances& variances);
UnsupervisedParams MStep(const MultichannelStft& x, UnsupervisedParams params, const Vae& vae,
                         const LatentChain& chain);

struct IterationRecord {
  int iteration = 0;
  double cost_before = 0.0;  // C on the new samples, before the M-step
  double cost = 0.0;         // C after the M-step
  double acceptance_rate = 0.0;
};

// {"iteration":..,"cost":..,"cost_before":..,"acceptance_rate":..}
std::string ToJsonLine(const IterationRecord& r);

struct McemResult {
  UnsupervisedParams params;
  LatentChain chain;
  std::vector<IterationRecord> history;
};

using ProgressFn = std::function<void(const IterationRecord&)>;

// Full inference: initial parameters, encoder-initialized chain, then
// em_iterations alternations of EStep and MStep.
McemResult RunMcem(const MultichannelStft& x, const Vae& vae, const McemConfig& cfg,
                   const ProgressFn& progress = {});

}  // namespace mvae

#endif  // MVAE_MCEM_HPP_
