// tests/model_test.cpp

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

#include "mvae/model.hpp"

#include <cmath>
#include <numbers>
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
using testing::Cd;
using testing::ToEigen;

TEST(SigmaXTest, NoiseOnly) {
  UnsupervisedParams p = InitialParams(1, 1, 1, 2, 0);
  p.gain[0] = 0.0;
  p.noise_dict(0, 0) = 1.0;
  p.noise_act(0, 0) = 1.0;
  EXPECT_EQ(ToEigen(SigmaX(p, 3.0, 0, 0)), CMat::Identity(2, 2));
}

TEST(SigmaXTest, SpeechOnly) {
  UnsupervisedParams p = InitialParams(1, 1, 1, 2, 0);
  p.noise_dict(0, 0) = kNmfFloor;
  p.noise_act(0, 0) = kNmfFloor;
  EXPECT_LT((ToEigen(SigmaX(p, 1.0, 0, 0)) - CMat::Identity(2, 2)).norm(), 1e-15);
}

TEST(SigmaXTest, RandomParamsMatchAssembly) {
  std::mt19937_64 rng(21);
  const UnsupervisedParams p = testing::RandomParams(rng, 6, 4, 3, 3);
  std::vector<double> vars(6);
  for (double& v : vars) v = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
  for (int f = 0; f < 6; ++f) {
    for (int n = 0; n < 4; ++n) {
      const CMat ref = testing::SigmaOracle(p, vars[f], f, n);
      EXPECT_LT((ToEigen(SigmaX(p, vars[f], f, n)) - ref).norm(), 1e-12 * ref.norm());
      EXPECT_LT((ToEigen(SigmaX(p, vars, f, n)) - ref).norm(), 1e-12 * ref.norm());
    }
  }
}

TEST(LogLikelihoodTest, ZeroObservation) {
  const std::vector<Complex> x(3, Complex(0.0, 0.0));
  EXPECT_NEAR(LogLikelihood(x, HermitianMatrix::Identity(3)), -3.0 * std::log(std::numbers::pi), 1e-14);
}

TEST(LogLikelihoodTest, ScalarCase) {
  const double s2 = 2.5;
  const std::vector<Complex> x = {std::polar(std::sqrt(s2), 0.7)};
  const std::vector<double> d = {s2};
  EXPECT_NEAR(LogLikelihood(x, HermitianMatrix::Diagonal(d)), -std::log(std::numbers::pi) - std::log(s2) - 1.0,
              1e-14);
}

TEST(LogLikelihoodTest, RandomMatchesQuadraticForm) {
  std::mt19937_64 rng(22);
  for (int dim : {1, 2, 3, 5}) {
    for (int t = 0; t < 20; ++t) {
      const CMat s = testing::RandomPdMatrix(rng, dim);
      CVec x(dim);
      for (int i = 0; i < dim; ++i) x(i) = testing::RandomComplex(rng);
      const double ref = -dim * std::log(std::numbers::pi) - std::log(s.determinant().real()) -
                         (x.adjoint() * s.inverse() * x)(0, 0).real();
      const std::vector<Complex> xs(x.data(), x.data() + dim);
      EXPECT_NEAR(LogLikelihood(xs, testing::ToHermitian(s)), ref, 1e-10 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST(LogLikelihoodTest, SingularThrows) {
  const std::vector<Complex> x(2, Complex(1.0, 0.0));
  EXPECT_THROW(LogLikelihood(x, HermitianMatrix::Zero(2)), SingularMatrixError);
}

TEST(NormalizeTest, AlreadyNormalizedUnchanged) {
  std::mt19937_64 rng(23);
  const UnsupervisedParams p = Normalize(testing::RandomParams(rng, 5, 4, 2, 2));
  const UnsupervisedParams q = Normalize(p);
  EXPECT_LT((q.noise_dict - p.noise_dict).norm(), 1e-12 * p.noise_dict.norm());
  EXPECT_LT((q.noise_act - p.noise_act).norm(), 1e-12 * p.noise_act.norm());
  for (int f = 0; f < 5; ++f) {
    EXPECT_LT((ToEigen(q.noise_scm[f]) - ToEigen(p.noise_scm[f])).norm(), 1e-12);
    EXPECT_NEAR(p.noise_scm[f].Trace(), 1.0, 1e-12);
  }
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(p.noise_dict.col(k).sum(), 1.0, 1e-12);
}

TEST(NormalizeTest, ScaleTransfer) {
  UnsupervisedParams p = InitialParams(1, 1, 1, 2, 0);
  p.noise_scm[0] = 2.0 * HermitianMatrix::Identity(2);
  p.noise_dict(0, 0) = 1.0;
  p.noise_act(0, 0) = 1.0;
  const CMat before = ToEigen(SigmaX(p, 1.0, 0, 0));
  const UnsupervisedParams q = Normalize(p);
  EXPECT_NEAR(q.noise_scm[0].Trace(), 1.0, 1e-12);
  EXPECT_LT((ToEigen(SigmaX(q, 1.0, 0, 0)) - before).norm(), 1e-12);
}

TEST(NormalizeTest, SigmaInvariantOnRandomParams) {
  std::mt19937_64 rng(24);
  const UnsupervisedParams p = testing::RandomParams(rng, 7, 5, 3, 2);
  const UnsupervisedParams q = Normalize(p);
  for (int f = 0; f < 7; ++f) {
    for (int n = 0; n < 5; ++n) {
      for (double v : {0.01, 1.0, 30.0}) {
        const CMat a = ToEigen(SigmaX(p, v, f, n));
        EXPECT_LT((ToEigen(SigmaX(q, v, f, n)) - a).norm(), 1e-10 * a.norm());
      }
    }
  }
}

TEST(ParamsJsonTest, RoundTrip) {
  std::mt19937_64 rng(25);
  const UnsupervisedParams p = testing::RandomParams(rng, 4, 3, 2, 2);
  const UnsupervisedParams q = ParamsFromJson(ParamsToJson(p));
  EXPECT_EQ(q.noise_dict, p.noise_dict);
  EXPECT_EQ(q.noise_act, p.noise_act);
  EXPECT_EQ(q.gain, p.gain);
  for (int f = 0; f < 4; ++f) {
    EXPECT_EQ(ToEigen(q.speech_scm[f]), ToEigen(p.speech_scm[f]));
    EXPECT_EQ(ToEigen(q.noise_scm[f]), ToEigen(p.noise_scm[f]));
  }
  testing::TempDir dir;
  SaveParams(p, dir / "p.json");
  EXPECT_EQ(LoadParams(dir / "p.json").gain, p.gain);
}

TEST(ParamsJsonTest, MalformedThrows) {
  EXPECT_THROW(ParamsFromJson("{not json"), FormatError);
  EXPECT_THROW(ParamsFromJson("{}"), FormatError);
}

TEST(InitialParamsTest, RangesAndDeterminism) {
  const UnsupervisedParams a = InitialParams(10, 6, 3, 2, 9);
  const UnsupervisedParams b = InitialParams(10, 6, 3, 2, 9);
  EXPECT_EQ(a.noise_dict, b.noise_dict);
  EXPECT_GE(a.noise_dict.minCoeff(), 0.1);
  EXPECT_LE(a.noise_act.maxCoeff(), 1.0);
  for (double g : a.gain) EXPECT_EQ(g, 1.0);
  EXPECT_EQ(ToEigen(a.speech_scm[3]), CMat::Identity(2, 2));
  EXPECT_NO_THROW(a.CheckShapes());
}

TEST(LatentChainTest, StoreAndDecode) {
  RandomVaeOptions o;
  o.latent_dim = 2;
  o.spectrum_dim = 5;
  o.hidden = {4};
  const Vae vae(RandomVae(o));
  LatentChain chain(3, 2);
  chain.ResetSamples(2);
  for (int n = 0; n < 3; ++n) chain.state(n)[0] = n;
  chain.StoreSample(0);
  for (int n = 0; n < 3; ++n) chain.state(n)[1] = -1.0;
  chain.StoreSample(1);
  EXPECT_EQ(chain.kept(), 2);
  EXPECT_EQ(chain.sample(0, 2)[0], 2.0);
  EXPECT_EQ(chain.sample(0, 2)[1], 0.0);
  EXPECT_EQ(chain.sample(1, 2)[1], -1.0);
  const SpeechVariances v = DecodeSamples(vae, chain);
  ASSERT_EQ(v.samples(), 2);
  for (int r = 0; r < 2; ++r) {
    for (int n = 0; n < 3; ++n) {
      const auto ref = vae.DecoderForward(chain.sample(r, n));
      for (int f = 0; f < 5; ++f) EXPECT_EQ(v(r, f, n), ref[f]);
    }
  }
}

}  // namespace
}  // namespace mvae
