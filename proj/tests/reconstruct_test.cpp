// tests/reconstruct_test.cpp

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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mvae/error.hpp"
#include "mvae/nn.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mvae {
namespace {

using testing::CMat;
using testing::CVec;

TEST(ReconstructionSamplerTest, Schedule) {
  const SamplerConfig s = ReconstructionSampler();
  EXPECT_EQ(s.iterations, 100);
  EXPECT_EQ(s.burn_in, 50);
  EXPECT_EQ(s.proposal_variance, 0.01);
}

TEST(WienerTest, NoNoiseLimit) {
  std::mt19937_64 rng(51);
  UnsupervisedParams p = testing::RandomParams(rng, 4, 3, 2, 2);
  p.noise_dict.setConstant(kNmfFloor);
  p.noise_act.setConstant(kNmfFloor);
  const MultichannelStft x = testing::RandomStft(rng, 2, 4, 3);
  const SpeechVariances v = testing::RandomVariances(rng, 2, 3, 4);
  MultichannelStft s, b;
  ApplyAveragedWiener(x, p, v, s, b);
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    EXPECT_LT(std::abs(s.data()[i] - x.data()[i]), 1e-8);
    EXPECT_LT(std::abs(b.data()[i]), 1e-8);
  }
}

TEST(WienerTest, NoSpeechLimit) {
  std::mt19937_64 rng(52);
  UnsupervisedParams p = testing::RandomParams(rng, 4, 3, 2, 2);
  for (double& g : p.gain) g = 0.0;
  const MultichannelStft x = testing::RandomStft(rng, 2, 4, 3);
  const SpeechVariances v = testing::RandomVariances(rng, 2, 3, 4);
  MultichannelStft s, b;
  ApplyAveragedWiener(x, p, v, s, b);
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    EXPECT_EQ(s.data()[i], Complex(0.0, 0.0));
    EXPECT_EQ(b.data()[i], x.data()[i]);
  }
}

TEST(WienerTest, ScalarGain) {
  std::mt19937_64 rng(53);
  const int F = 5, N = 4;
  UnsupervisedParams p = testing::RandomParams(rng, F, N, 3, 1);
  const std::vector<double> one = {1.0};
  for (int f = 0; f < F; ++f) {
    p.speech_scm[f] = HermitianMatrix::Diagonal(one);
    p.noise_scm[f] = HermitianMatrix::Diagonal(one);
  }
  const MultichannelStft x = testing::RandomStft(rng, 1, F, N);
  const SpeechVariances v = testing::RandomVariances(rng, 1, N, F);
  MultichannelStft s, b;
  ApplyAveragedWiener(x, p, v, s, b);
  for (int f = 0; f < F; ++f) {
    for (int n = 0; n < N; ++n) {
      const double sv = p.gain[n] * v(0, f, n);
      const double gain = sv / (sv + testing::NoiseVarOracle(p, f, n));
      EXPECT_LT(std::abs(s.at(0, f, n) - gain * x.at(0, f, n)), 1e-12);
      EXPECT_LE(std::abs(s.at(0, f, n)), std::abs(x.at(0, f, n)));
    }
  }
}

TEST(WienerTest, MultichannelMatchesAveragedOracle) {
  std::mt19937_64 rng(54);
  const int F = 3, N = 4, R = 3, I = 3;
  const UnsupervisedParams p = testing::RandomParams(rng, F, N, 2, I);
  const MultichannelStft x = testing::RandomStft(rng, I, F, N);
  const SpeechVariances v = testing::RandomVariances(rng, R, N, F);
  MultichannelStft s, b;
  ApplyAveragedWiener(x, p, v, s, b);
  for (int f = 0; f < F; ++f) {
    for (int n = 0; n < N; ++n) {
      const CVec xv = testing::BinVector(x, f, n);
      CVec ref = CVec::Zero(I);
      for (int r = 0; r < R; ++r) {
        const CMat sigma = testing::SigmaOracle(p, v(r, f, n), f, n);
        ref += p.gain[n] * v(r, f, n) * testing::ToEigen(p.speech_scm[f]) * sigma.inverse() * xv;
      }
      ref /= R;
      for (int i = 0; i < I; ++i) {
        EXPECT_LT(std::abs(s.at(i, f, n) - ref(i)), 1e-10 * std::max(1.0, ref.norm()));
        EXPECT_LT(std::abs(s.at(i, f, n) + b.at(i, f, n) - x.at(i, f, n)), 1e-12);
      }
    }
  }
}

// Each averaged filter is a convex combination of matrices with eigenvalues
// in [0, 1] in the Sigma-weighted sense, so speech energy measured in the
// Sigma^{-1} metric cannot exceed that of the mixture for R = 1.
TEST(WienerTest, PassiveInWhitenedMetric) {
  std::mt19937_64 rng(55);
  const UnsupervisedParams p = testing::RandomParams(rng, 4, 5, 2, 2);
  const MultichannelStft x = testing::RandomStft(rng, 2, 4, 5);
  const SpeechVariances v = testing::RandomVariances(rng, 1, 5, 4);
  MultichannelStft s, b;
  ApplyAveragedWiener(x, p, v, s, b);
  for (int f = 0; f < 4; ++f) {
    for (int n = 0; n < 5; ++n) {
      const CMat inv = testing::SigmaOracle(p, v(0, f, n), f, n).inverse();
      const CVec xv = testing::BinVector(x, f, n);
      const CVec sv = testing::BinVector(s, f, n);
      EXPECT_LE((sv.adjoint() * inv * sv)(0, 0).real(), (xv.adjoint() * inv * xv)(0, 0).real() * (1 + 1e-12));
    }
  }
}

TEST(WienerTest, SingularCovarianceThrows) {
  UnsupervisedParams p = InitialParams(2, 2, 1, 2, 0);
  for (double& g : p.gain) g = 0.0;
  p.noise_dict.setZero();
  MultichannelStft x(2, 2, 2);
  const SpeechVariances v(1, 2, 2, 1.0);
  MultichannelStft s, b;
  EXPECT_THROW(ApplyAveragedWiener(x, p, v, s, b), SingularMatrixError);
}

TEST(WienerTest, ShapeMismatchThrows) {
  const UnsupervisedParams p = InitialParams(3, 2, 1, 2, 0);
  MultichannelStft x(2, 3, 2);
  const SpeechVariances v(1, 2, 4, 1.0);
  MultichannelStft s, b;
  EXPECT_THROW(ApplyAveragedWiener(x, p, v, s, b), ConfigError);
}

TEST(WienerEstimateTest, ImagesSumToMixture) {
  std::mt19937_64 rng(56);
  const StftConfig stft{16000, 64, 16};
  Waveform w;
  w.channels.assign(2, std::vector<double>(600));
  std::normal_distribution<double> nd(0.0, 0.2);
  for (auto& c : w.channels) {
    for (double& t : c) t = nd(rng);
  }
  const MultichannelStft x = Analyze(w, stft);
  RandomVaeOptions o;
  o.latent_dim = 2;
  o.spectrum_dim = x.bins();
  o.hidden = {8};
  const Vae vae(RandomVae(o));
  const UnsupervisedParams p = testing::RandomParams(rng, x.bins(), x.frames(), 2, 2);
  FrameRngs rngs(0, kReconstructionStream, x.frames());
  const EnhancementResult r =
      WienerEstimate(x, p, vae, LatentChain(x.frames(), 2), SamplerConfig{6, 3, 0.01}, rngs, stft);
  ASSERT_EQ(r.speech_wav.num_samples(), 600u);
  ASSERT_EQ(r.noise_wav.num_samples(), 600u);
  for (int c = 0; c < 2; ++c) {
    for (std::size_t t = 0; t < 600; ++t) {
      EXPECT_NEAR(r.speech_wav.channels[c][t] + r.noise_wav.channels[c][t], w.channels[c][t], 1e-9);
    }
  }
}

}  // namespace
}  // namespace mvae
