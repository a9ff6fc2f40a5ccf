// core/src/reconstruct.cpp

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

#include "mvae/reconstruct.hpp"

#include "kernels.hpp"
#include "mvae/error.hpp"
#include "parallel.hpp"

namespace mvae {

SamplerConfig ReconstructionSampler() {
  SamplerConfig cfg;
  cfg.iterations = 100;
  cfg.burn_in = 50;
  cfg.proposal_variance = 0.01;
  return cfg;
}

namespace {

template <int I>
void WienerT(const MultichannelStft& x, const UnsupervisedParams& params,
             const SpeechVariances& variances, MultichannelStft& speech, MultichannelStft& noise) {
  const int F = x.bins();
  const int R = variances.samples();
  const Eigen::MatrixXd noise_var = params.noise_dict * params.noise_act;
  std::vector<internal::Mat<I>> rs;
  std::vector<internal::Mat<I>> rb;
  for (int f = 0; f < F; ++f) {
    rs.push_back(internal::Load<I>(params.speech_scm[f]));
    rb.push_back(internal::Load<I>(params.noise_scm[f]));
  }
  internal::ParallelFor(x.frames(), [&](int n) {
    for (int f = 0; f < F; ++f) {
      const auto xfn = x.bin(f, n);
      const internal::Vec<I> xv = internal::Load<I>(xfn);
      internal::Vec<I> acc = internal::Vec<I>::Zero(x.channels());
      for (int r = 0; r < R; ++r) {
        const double sv = params.gain[n] * variances(r, f, n);
        const internal::Mat<I> inv = internal::InverseOf<I>(sv * rs[f] + noise_var(f, n) * rb[f], false);
        acc.noalias() += sv * (rs[f] * (inv * xv));
      }
      acc /= static_cast<double>(R);
      auto s = speech.bin(f, n);
      auto b = noise.bin(f, n);
      for (int i = 0; i < x.channels(); ++i) {
        s[i] = acc(i);
        b[i] = xfn[i] - acc(i);
      }
    }
  });
}

}  // namespace

void ApplyAveragedWiener(const MultichannelStft& x, const UnsupervisedParams& params,
                         const SpeechVariances& variances, MultichannelStft& speech,
                         MultichannelStft& noise) {
  params.CheckShapes();
  if (x.bins() != params.bins() || x.frames() != params.frames() ||
      x.channels() != params.channels()) {
    throw ConfigError("wiener: observation and parameter shapes differ");
  }
  if (variances.samples() < 1 || variances.bins() != x.bins() || variances.frames() != x.frames()) {
    throw ConfigError("wiener: speech variance samples do not match the observation");
  }
  speech = MultichannelStft(x.channels(), x.bins(), x.frames(), x.signal_length());
  noise = MultichannelStft(x.channels(), x.bins(), x.frames(), x.signal_length());
  internal::DispatchChannels(x.channels(), [&](auto c) {
    WienerT<decltype(c)::value>(x, params, variances, speech, noise);
  });
}

void SynthesizeImages(EnhancementResult& result, const StftConfig& stft) {
  result.speech_wav = Synthesize(result.speech_stft, stft);
  result.noise_wav = Synthesize(result.noise_stft, stft);
}

EnhancementResult WienerEstimate(const MultichannelStft& x, const UnsupervisedParams& params,
                                 const Vae& vae, LatentChain chain, const SamplerConfig& sampler,
                                 FrameRngs& rngs, const StftConfig& stft) {
  chain = EStep(x, params, vae, std::move(chain), sampler, rngs);
  EnhancementResult result;
  ApplyAveragedWiener(x, params, DecodeSamples(vae, chain), result.speech_stft, result.noise_stft);
  SynthesizeImages(result, stft);
  return result;
}

}  // namespace mvae
