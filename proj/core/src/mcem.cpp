// core/src/mcem.cpp

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

#include "mvae/mcem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "kernels.hpp"
#include "mvae/error.hpp"
#include "parallel.hpp"

namespace mvae {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void CheckCompatible(const MultichannelStft& x, const UnsupervisedParams& p) {
  if (x.bins() != p.bins() || x.frames() != p.frames() || x.channels() != p.channels()) {
    throw ConfigError("observation is " + std::to_string(x.channels()) + "x" +
                      std::to_string(x.bins()) + "x" + std::to_string(x.frames()) +
                      " but parameters are " + std::to_string(p.channels()) + "x" +
                      std::to_string(p.bins()) + "x" + std::to_string(p.frames()));
  }
}

void CheckCompatible(const MultichannelStft& x, const UnsupervisedParams& p, const SpeechVariances& v) {
  CheckCompatible(x, p);
  if (v.bins() != x.bins() || v.frames() != x.frames() || v.samples() < 1) {
    throw ConfigError("speech variance samples do not match the observation");
  }
}

template <int I>
std::vector<internal::Mat<I>> LoadScms(const std::vector<HermitianMatrix>& scms) {
  std::vector<internal::Mat<I>> out;
  out.reserve(scms.size());
  for (const HermitianMatrix& r : scms) out.push_back(internal::Load<I>(r));
  return out;
}

template <int I>
double FrameLogLikelihoodT(const MultichannelStft& x, const UnsupervisedParams& p, int n,
                           std::span<const double> speech_var, const Eigen::VectorXd& noise_var) {
  const int F = x.bins();
  const double g = p.gain[n];
  double acc = -F * x.channels() * std::log(std::numbers::pi);
  for (int f = 0; f < F; ++f) {
    const internal::Mat<I> sigma = (g * speech_var[f]) * internal::Load<I>(p.speech_scm[f]) +
                                   noise_var(f) * internal::Load<I>(p.noise_scm[f]);
    double log_det = 0.0;
    double quad = 0.0;
    try {
      internal::LogDetQuad<I>(sigma, internal::Load<I>(x.bin(f, n)), log_det, quad);
    } catch (const SingularMatrixError&) {
      return kNegInf;
    }
    acc -= log_det + quad;
  }
  return acc;
}

double FrameLogLikelihoodImpl(const MultichannelStft& x, const UnsupervisedParams& p, int n,
                              std::span<const double> speech_var, const Eigen::VectorXd& noise_var) {
  return internal::DispatchChannels(x.channels(), [&](auto c) {
    return FrameLogLikelihoodT<decltype(c)::value>(x, p, n, speech_var, noise_var);
  });
}

Eigen::VectorXd NoiseColumn(const UnsupervisedParams& p, int n) {
  return p.noise_dict * p.noise_act.col(n);
}

enum class Source { kSpeech, kNoise };

// Per-bin accumulators shared by the multiplicative updates:
//   num_fn = sum_r w_r tr(M_fn^(r) R_f),  den_fn = sum_r w_r tr(Sigma^-1 R_f)
// with w_r = sigma_f^2(z_n^(r)) for the speech source and 1 for noise.
struct TraceStats {
  Eigen::MatrixXd num;
  Eigen::MatrixXd den;
};

template <int I>
TraceStats AccumulateTracesT(const MultichannelStft& x, const UnsupervisedParams& p,
                             const SpeechVariances& v, Source source) {
  const int F = x.bins();
  const int N = x.frames();
  const int R = v.samples();
  const Eigen::MatrixXd noise_var = p.noise_dict * p.noise_act;
  const auto rs = LoadScms<I>(p.speech_scm);
  const auto rb = LoadScms<I>(p.noise_scm);
  TraceStats s{Eigen::MatrixXd::Zero(F, N), Eigen::MatrixXd::Zero(F, N)};
  internal::ParallelFor(N, [&](int n) {
    for (int f = 0; f < F; ++f) {
      const internal::Mat<I>& target = source == Source::kSpeech ? rs[f] : rb[f];
      const internal::Vec<I> xfn = internal::Load<I>(x.bin(f, n));
      double num = 0.0;
      double den = 0.0;
      for (int r = 0; r < R; ++r) {
        const double sv = v(r, f, n);
        const internal::Mat<I> inv =
            internal::InverseOf<I>((p.gain[n] * sv) * rs[f] + noise_var(f, n) * rb[f], true);
        const internal::Vec<I> y = inv * xfn;
        const double w = source == Source::kSpeech ? sv : 1.0;
        num += w * internal::Quad<I>(target, y);
        den += w * internal::TraceOfProduct<I>(inv, target);
      }
      s.num(f, n) = num;
      s.den(f, n) = den;
    }
  });
  return s;
}

TraceStats AccumulateTraces(const MultichannelStft& x, const UnsupervisedParams& p,
                            const SpeechVariances& v, Source source) {
  return internal::DispatchChannels(x.channels(), [&](auto c) {
    return AccumulateTracesT<decltype(c)::value>(x, p, v, source);
  });
}

double MultiplicativeFactor(double num, double den) {
  if (!(den > 0.0)) throw NumericalError("multiplicative update: non-positive denominator");
  return std::sqrt(std::max(num, 0.0) / den);
}

// Riccati update of one source SCM per bin. The weight of sample (r, n) is
// g_n sigma_f^2 for speech and (W_b H_b)_{f,n} for noise.
template <int I>
void UpdateScmT(const MultichannelStft& x, UnsupervisedParams& p, const SpeechVariances& v,
                Source source) {
  const int F = x.bins();
  const int N = x.frames();
  const int R = v.samples();
  const Eigen::MatrixXd noise_var = p.noise_dict * p.noise_act;
  const auto rs = LoadScms<I>(p.speech_scm);
  const auto rb = LoadScms<I>(p.noise_scm);
  std::vector<HermitianMatrix> updated(F);
  internal::ParallelFor(F, [&](int f) {
    internal::Mat<I> psi = internal::Mat<I>::Zero(x.channels(), x.channels());
    internal::Mat<I> q = internal::Mat<I>::Zero(x.channels(), x.channels());
    for (int n = 0; n < N; ++n) {
      const internal::Vec<I> xfn = internal::Load<I>(x.bin(f, n));
      for (int r = 0; r < R; ++r) {
        const double speech = p.gain[n] * v(r, f, n);
        const internal::Mat<I> inv =
            internal::InverseOf<I>(speech * rs[f] + noise_var(f, n) * rb[f], true);
        const internal::Vec<I> y = inv * xfn;
        const double w = source == Source::kSpeech ? speech : noise_var(f, n);
        psi += w * inv;
        q.noalias() += w * (y * y.adjoint());
      }
    }
    const HermitianMatrix& previous = source == Source::kSpeech ? p.speech_scm[f] : p.noise_scm[f];
    updated[f] = ClampToPd(SolveRiccati(Hermitize(psi), Sandwich(previous, Hermitize(q))));
  });
  (source == Source::kSpeech ? p.speech_scm : p.noise_scm) = std::move(updated);
}

void UpdateScm(const MultichannelStft& x, UnsupervisedParams& p, const SpeechVariances& v,
               Source source) {
  internal::DispatchChannels(x.channels(), [&](auto c) {
    UpdateScmT<decltype(c)::value>(x, p, v, source);
  });
}

template <int I>
double CostT(const MultichannelStft& x, const UnsupervisedParams& params,
             const SpeechVariances& variances) {
  const int F = x.bins();
  const int N = x.frames();
  const int R = variances.samples();
  const Eigen::MatrixXd noise_var = params.noise_dict * params.noise_act;
  const auto rs = LoadScms<I>(params.speech_scm);
  const auto rb = LoadScms<I>(params.noise_scm);
  std::vector<double> per_frame(N, 0.0);
  internal::ParallelFor(N, [&](int n) {
    double acc = 0.0;
    for (int r = 0; r < R; ++r) {
      for (int f = 0; f < F; ++f) {
        const internal::Mat<I> sigma =
            (params.gain[n] * variances(r, f, n)) * rs[f] + noise_var(f, n) * rb[f];
        double log_det = 0.0;
        double quad = 0.0;
        internal::LogDetQuad<I>(sigma, internal::Load<I>(x.bin(f, n)), log_det, quad);
        acc += quad + log_det;
      }
    }
    per_frame[n] = acc;
  });
  double total = 0.0;
  for (double v : per_frame) total += v;
  return total;
}

}  // namespace

void SamplerConfig::Validate() const {
  if (iterations < 1) throw ConfigError("sampler: at least one MH iteration is required");
  if (burn_in < 0 || burn_in >= iterations) {
    throw ConfigError("sampler: burn-in must lie in [0, iterations)");
  }
  if (!(proposal_variance > 0.0) || !std::isfinite(proposal_variance)) {
    throw ConfigError("sampler: proposal variance must be positive");
  }
}

void McemConfig::Validate() const {
  if (em_iterations < 0) throw ConfigError("mcem: negative iteration count");
  if (noise_rank < 1) throw ConfigError("mcem: noise rank must be positive");
  sampler.Validate();
}

FrameRngs::FrameRngs(std::uint64_t seed, std::uint64_t stream, int frames) {
  engines_.reserve(frames);
  for (int n = 0; n < frames; ++n) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(n)};
    engines_.emplace_back(seq);
  }
}

double LatentLogPrior(std::span<const double> z) {
  double acc = 0.0;
  for (double v : z) acc += v * v;
  return -0.5 * acc - 0.5 * static_cast<double>(z.size()) * std::log(2.0 * std::numbers::pi);
}

double FrameLogLikelihood(const MultichannelStft& x, const UnsupervisedParams& params, int n,
                          std::span<const double> speech_variances) {
  CheckCompatible(x, params);
  return FrameLogLikelihoodImpl(x, params, n, speech_variances, NoiseColumn(params, n));
}

double FrameLogTarget(const MultichannelStft& x, const UnsupervisedParams& params, const Vae& vae,
                      int n, std::span<const double> z) {
  const std::vector<double> var = vae.DecoderForward(z);
  return LatentLogPrior(z) + FrameLogLikelihood(x, params, n, var);
}

double LogAcceptance(double current_log_target, double proposal_log_target) {
  if (std::isnan(proposal_log_target) || proposal_log_target == kNegInf) return kNegInf;
  if (current_log_target == kNegInf) return 0.0;
  return std::min(0.0, proposal_log_target - current_log_target);
}

void RefreshLogTargets(LatentChain& chain, const MultichannelStft& x,
                       const UnsupervisedParams& params, const Vae& vae) {
  CheckCompatible(x, params);
  if (chain.frames() != x.frames()) throw ConfigError("chain and observation frame counts differ");
  internal::ParallelFor(x.frames(), [&](int n) {
    const std::vector<double> var = vae.DecoderForward(chain.state(n));
    chain.log_target()[n] = LatentLogPrior(chain.state(n)) +
                            FrameLogLikelihoodImpl(x, params, n, var, NoiseColumn(params, n));
  });
}

int MhStep(LatentChain& chain, const MultichannelStft& x, const UnsupervisedParams& params,
           const Vae& vae, FrameRngs& rngs, double proposal_variance) {
  CheckCompatible(x, params);
  if (chain.frames() != x.frames() || rngs.size() != x.frames()) {
    throw ConfigError("mh step: chain, generators and observation frame counts differ");
  }
  const int L = chain.latent_dim();
  const double step = std::sqrt(proposal_variance);
  std::vector<int> accepted(x.frames(), 0);
  internal::ParallelFor(x.frames(), [&](int n) {
    std::mt19937_64& rng = rngs[n];
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> proposal(L);
    const auto current = chain.state(n);
    for (int l = 0; l < L; ++l) proposal[l] = current[l] + step * normal(rng);
    const double u = uniform(rng);
    const std::vector<double> var = vae.DecoderForward(proposal);
    const double target = LatentLogPrior(proposal) +
                          FrameLogLikelihoodImpl(x, params, n, var, NoiseColumn(params, n));
    if (std::log(u) < LogAcceptance(chain.log_target()[n], target)) {
      std::copy(proposal.begin(), proposal.end(), current.begin());
      chain.log_target()[n] = target;
      accepted[n] = 1;
    }
  });
  int total = 0;
  for (int a : accepted) total += a;
  return total;
}

LatentChain EStep(const MultichannelStft& x, const UnsupervisedParams& params, const Vae& vae,
                  LatentChain chain, const SamplerConfig& cfg, FrameRngs& rngs) {
  cfg.Validate();
  if (chain.latent_dim() != vae.latent_dim()) throw ConfigError("chain and decoder latent sizes differ");
  RefreshLogTargets(chain, x, params, vae);
  chain.ResetSamples(cfg.kept());
  long accepted = 0;
  for (int m = 0; m < cfg.iterations; ++m) {
    accepted += MhStep(chain, x, params, vae, rngs, cfg.proposal_variance);
    if (m >= cfg.burn_in) chain.StoreSample(m - cfg.burn_in);
  }
  chain.set_acceptance_rate(static_cast<double>(accepted) /
                            (static_cast<double>(cfg.iterations) * std::max(1, x.frames())));
  return chain;
}

LatentChain InitializeChain(const MultichannelStft& x, const Vae& vae, FrameRngs& rngs) {
  if (x.bins() != vae.spectrum_dim()) {
    throw ConfigError("mixture has " + std::to_string(x.bins()) + " frequency bins but the network expects " +
                      std::to_string(vae.spectrum_dim()));
  }
  if (rngs.size() != x.frames()) throw ConfigError("generator count differs from frame count");
  const int F = x.bins();
  const int N = x.frames();
  const int L = vae.latent_dim();
  const std::vector<double> power = ChannelMeanPower(x);
  LatentChain chain(N, L);
  internal::ParallelFor(N, [&](int n) {
    std::vector<double> column(F);
    for (int f = 0; f < F; ++f) column[f] = power[static_cast<std::size_t>(f) * N + n];
    const EncoderOutput q = vae.EncoderForward(column);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto z = chain.state(n);
    for (int l = 0; l < L; ++l) z[l] = q.mean[l] + std::sqrt(q.variance[l]) * normal(rngs[n]);
  });
  return chain;
}

double Cost(const MultichannelStft& x, const UnsupervisedParams& params,
            const SpeechVariances& variances) {
  CheckCompatible(x, params, variances);
  return internal::DispatchChannels(x.channels(), [&](auto c) {
    return CostT<decltype(c)::value>(x, params, variances);
  });
}

double QTilde(const MultichannelStft& x, const UnsupervisedParams& params,
              const SpeechVariances& variances) {
  return -Cost(x, params, variances) / variances.samples();
}

double QTilde(const MultichannelStft& x, const UnsupervisedParams& params, const Vae& vae,
              const LatentChain& chain) {
  return QTilde(x, params, DecodeSamples(vae, chain));
}

void UpdateNoiseDict(const MultichannelStft& x, UnsupervisedParams& params,
                     const SpeechVariances& variances) {
  CheckCompatible(x, params, variances);
  const TraceStats s = AccumulateTraces(x, params, variances, Source::kNoise);
  const Eigen::MatrixXd num = s.num * params.noise_act.transpose();
  const Eigen::MatrixXd den = s.den * params.noise_act.transpose();
  for (int f = 0; f < params.bins(); ++f) {
    for (int k = 0; k < params.rank(); ++k) {
      params.noise_dict(f, k) =
          std::max(kNmfFloor, params.noise_dict(f, k) * MultiplicativeFactor(num(f, k), den(f, k)));
    }
  }
}

void UpdateNoiseAct(const MultichannelStft& x, UnsupervisedParams& params,
                    const SpeechVariances& variances) {
  CheckCompatible(x, params, variances);
  const TraceStats s = AccumulateTraces(x, params, variances, Source::kNoise);
  const Eigen::MatrixXd num = params.noise_dict.transpose() * s.num;
  const Eigen::MatrixXd den = params.noise_dict.transpose() * s.den;
  for (int k = 0; k < params.rank(); ++k) {
    for (int n = 0; n < params.frames(); ++n) {
      params.noise_act(k, n) =
          std::max(kNmfFloor, params.noise_act(k, n) * MultiplicativeFactor(num(k, n), den(k, n)));
    }
  }
}

void UpdateGain(const MultichannelStft& x, UnsupervisedParams& params,
                const SpeechVariances& variances) {
  CheckCompatible(x, params, variances);
  const TraceStats s = AccumulateTraces(x, params, variances, Source::kSpeech);
  for (int n = 0; n < params.frames(); ++n) {
    const double factor = MultiplicativeFactor(s.num.col(n).sum(), s.den.col(n).sum());
    params.gain[n] = std::max(kNmfFloor, params.gain[n] * factor);
  }
}

void UpdateSpeechScm(const MultichannelStft& x, UnsupervisedParams& params,
                     const SpeechVariances& variances) {
  CheckCompatible(x, params, variances);
  UpdateScm(x, params, variances, Source::kSpeech);
}

void UpdateNoiseScm(const MultichannelStft& x, UnsupervisedParams& params,
                    const SpeechVariances& variances) {
  CheckCompatible(x, params, variances);
  UpdateScm(x, params, variances, Source::kNoise);
}

UnsupervisedParams MStep(const MultichannelStft& x, UnsupervisedParams params,
                         const SpeechVariances& variances) {
  UpdateNoiseDict(x, params, variances);
  UpdateNoiseAct(x, params, variances);
  UpdateGain(x, params, variances);
  UpdateSpeechScm(x, params, variances);
  UpdateNoiseScm(x, params, variances);
  return Normalize(std::move(params));
}

UnsupervisedParams MStep(const MultichannelStft& x, UnsupervisedParams params, const Vae& vae,
                         const LatentChain& chain) {
  if (chain.kept() < 1) throw ConfigError("m-step: the chain holds no samples");
  return MStep(x, std::move(params), DecodeSamples(vae, chain));
}

std::string ToJsonLine(const IterationRecord& r) {
  const nlohmann::json j = {{"iteration", r.iteration},
                            {"cost", r.cost},
                            {"cost_before", r.cost_before},
                            {"acceptance_rate", r.acceptance_rate}};
  return j.dump();
}

McemResult RunMcem(const MultichannelStft& x, const Vae& vae, const McemConfig& cfg,
                   const ProgressFn& progress) {
  cfg.Validate();
  if (x.bins() != vae.spectrum_dim()) {
    throw ConfigError("mixture has " + std::to_string(x.bins()) +
                      " frequency bins but the network expects " + std::to_string(vae.spectrum_dim()));
  }
  McemResult result;
  result.params = InitialParams(x.bins(), x.frames(), cfg.noise_rank, x.channels(), cfg.seed);
  FrameRngs rngs(cfg.seed, kInferenceStream, x.frames());
  result.chain = InitializeChain(x, vae, rngs);
  for (int it = 1; it <= cfg.em_iterations; ++it) {
    result.chain = EStep(x, result.params, vae, std::move(result.chain), cfg.sampler, rngs);
    const SpeechVariances variances = DecodeSamples(vae, result.chain);
    IterationRecord record;
    record.iteration = it;
    record.acceptance_rate = result.chain.acceptance_rate();
    record.cost_before = Cost(x, result.params, variances);
    result.params = MStep(x, std::move(result.params), variances);
    record.cost = Cost(x, result.params, variances);
    result.history.push_back(record);
    if (progress) progress(record);
  }
  return result;
}

}  // namespace mvae
