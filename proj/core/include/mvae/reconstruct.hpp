// core/include/mvae/reconstruct.hpp

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

#ifndef MVAE_RECONSTRUCT_HPP_
#define MVAE_RECONSTRUCT_HPP_

#include "mvae/mcem.hpp"
#include "mvae/model.hpp"
#include "mvae/nn.hpp"
#include "mvae/stft.hpp"

namespace mvae {

// Posterior-mean estimates of the gain-scaled speech image and of the noise
// image. speech_stft + noise_stft reproduces the input STFT.
struct EnhancementResult {
  MultichannelStft speech_stft;
  MultichannelStft noise_stft;
  Waveform speech_wav;
  Waveform noise_wav;
};

// 100 MH iterations, 50 discarded, epsilon^2 = 0.01.
SamplerConfig ReconstructionSampler();

// speech = (1/R) sum_r g_n v_r R_s,f Sigma_x,fn(v_r)^{-1} x_fn and
// noise = x - speech, for every bin, where v_r = variances(r, f, n).
// Throws SingularMatrixError if some Sigma_x cannot be inverted.
void ApplyAveragedWiener(const MultichannelStft& x, const UnsupervisedParams& params,
                         const SpeechVariances& variances, MultichannelStft& speech,
                         MultichannelStft& noise);

// Draws fresh samples from the posterior starting at `chain` (the last E-step
// state), averages the Wiener gains over them and synthesizes both images.
EnhancementResult WienerEstimate(const MultichannelStft& x, const UnsupervisedParams& params,
                                 const Vae& vae, LatentChain chain, const SamplerConfig& sampler,
                                 FrameRngs& rngs, const StftConfig& stft);

// Only the synthesis part: fills speech_wav and noise_wav of `result`.
void SynthesizeImages(EnhancementResult& result, const StftConfig& stft);

}  // namespace mvae

#endif  // MVAE_RECONSTRUCT_HPP_
