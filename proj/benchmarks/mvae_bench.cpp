// benchmarks/mvae_bench.cpp

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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mvae/hermitian.hpp"
#include "mvae/mcem.hpp"
#include "mvae/model.hpp"
#include "mvae/nn.hpp"
#include "mvae/stft.hpp"

namespace mvae {
namespace {

HermitianMatrix RandomPd(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> nd;
  ComplexMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = {nd(rng), nd(rng)};
  }
  ComplexMatrix m = a * a.adjoint();
  m += 0.1 * ComplexMatrix::Identity(dim, dim);
  return Hermitize(m);
}

MultichannelStft RandomStft(std::mt19937_64& rng, int channels, int bins, int frames) {
  std::normal_distribution<double> nd;
  MultichannelStft x(channels, bins, frames);
  for (auto& v : x.data()) v = {nd(rng), nd(rng)};
  return x;
}

void BM_Riccati(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int dim = static_cast<int>(state.range(0));
  const HermitianMatrix psi = RandomPd(rng, dim);
  const HermitianMatrix phi = RandomPd(rng, dim);
  for (auto _ : state) benchmark::DoNotOptimize(SolveRiccati(psi, phi));
}
BENCHMARK(BM_Riccati)->Arg(2)->Arg(4);

void BM_Inverse(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const HermitianMatrix m = RandomPd(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Inverse(m));
}
BENCHMARK(BM_Inverse)->Arg(2)->Arg(4);

void BM_Analyze(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0.0, 0.1);
  Waveform w;
  w.channels.assign(2, std::vector<double>(48000));
  for (auto& c : w.channels) {
    for (double& v : c) v = nd(rng);
  }
  const StftConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(Analyze(w, cfg));
}
BENCHMARK(BM_Analyze)->Unit(benchmark::kMillisecond);

void BM_Decoder(benchmark::State& state) {
  RandomVaeOptions o;
  o.spectrum_dim = 513;
  const Vae vae(RandomVae(o));
  std::vector<double> z(16, 0.3);
  std::vector<double> out(513);
  for (auto _ : state) {
    vae.DecoderForward(z, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Decoder);

void BM_MhStep(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const int F = 513, N = 64;
  RandomVaeOptions o;
  o.spectrum_dim = F;
  const Vae vae(RandomVae(o));
  const MultichannelStft x = RandomStft(rng, 2, F, N);
  const UnsupervisedParams p = InitialParams(F, N, 10, 2, 0);
  LatentChain chain(N, vae.latent_dim());
  RefreshLogTargets(chain, x, p, vae);
  FrameRngs rngs(0, kInferenceStream, N);
  for (auto _ : state) benchmark::DoNotOptimize(MhStep(chain, x, p, vae, rngs, 0.01));
  state.SetItemsProcessed(state.iterations() * N);
}
BENCHMARK(BM_MhStep)->Unit(benchmark::kMillisecond);

void BM_MStep(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const int F = 513, N = 64, R = 10;
  const MultichannelStft x = RandomStft(rng, 2, F, N);
  const UnsupervisedParams p = InitialParams(F, N, 10, 2, 0);
  SpeechVariances v(R, N, F, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(MStep(x, p, v));
}
BENCHMARK(BM_MStep)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mvae

BENCHMARK_MAIN();
