// core/include/mvae/baseline.hpp

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

#ifndef MVAE_BASELINE_HPP_
#define MVAE_BASELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "mvae/model.hpp"
#include "mvae/reconstruct.hpp"
#include "mvae/stft.hpp"

namespace mvae {

// Fixed speech NMF dictionary W_s (F x K_s), columns summing to one.
struct SpeechDictionary {
  Eigen::MatrixXd basis;

  int bins() const { return static_cast<int>(basis.rows()); }
  int rank() const { return static_cast<int>(basis.cols()); }
};

// Container with type "nmf_dictionary" and a single tensor "speech_dict".
void SaveSpeechDictionary(const SpeechDictionary& dict, const std::filesystem::path& path);
SpeechDictionary LoadSpeechDictionary(const std::filesystem::path& path);

// sum_{f,n} d_IS(v_fn; (W H)_fn) with d_IS(a; b) = a/b - ln(a/b) - 1.
double ItakuraSaito(const Eigen::MatrixXd& v, const Eigen::MatrixXd& model);

struct PretrainConfig {
  int rank = 10;  // K_s
  int max_iterations = 500;
  double tolerance = 1e-6;  // stop once the relative cost change falls below
  std::uint64_t seed = 0;
};

struct PretrainResult {
  SpeechDictionary dict;
  Eigen::MatrixXd activations;      // K_s x N, rescaled with the dictionary
  std::vector<double> cost_history;  // cost_history[0] is the initial cost
};

// Single-channel IS-NMF of power spectra (F x N, one column per frame).
// Entries are floored at kNmfFloor so the divergence stays finite.
PretrainResult PretrainDictionary(const Eigen::MatrixXd& power, const PretrainConfig& cfg);

// Noise model and SCMs share UnsupervisedParams (its gain stays at one);
// H_s carries the speech scale.
struct BaselineParams {
  Eigen::MatrixXd speech_act;  // H_s, K_s x N
  UnsupervisedParams model;
};

struct BaselineConfig {
  int iterations = 50;
  int noise_rank = 10;
  std::uint64_t seed = 0;

  void Validate() const;
};

BaselineParams InitialBaselineParams(const MultichannelStft& x, const SpeechDictionary& dict,
                                     const BaselineConfig& cfg);

// (W_s H_s)_{f,n} as a single-sample variance set.
SpeechVariances BaselineSpeechVariances(const SpeechDictionary& dict, const Eigen::MatrixXd& speech_act);

// Cost of the baseline model on x (same criterion as the MCEM M-step with
// one sample).
double BaselineCost(const MultichannelStft& x, const SpeechDictionary& dict, const BaselineParams& p);

// Multiplicative update of H_s; W_s stays fixed.
void UpdateSpeechAct(const MultichannelStft& x, const SpeechDictionary& dict, BaselineParams& p);

// H_s, W_b, H_b, R_s, R_b, then Normalize.
void BaselineIteration(const MultichannelStft& x, const SpeechDictionary& dict, BaselineParams& p);

struct BaselineRecord {
  int iteration = 0;
  double cost = 0.0;
};

struct BaselineResult {
  BaselineParams params;
  std::vector<BaselineRecord> history;
  EnhancementResult images;
};

using BaselineProgressFn = std::function<void(const BaselineRecord&)>;

BaselineResult RunBaseline(const MultichannelStft& x, const SpeechDictionary& dict,
                           const BaselineConfig& cfg, const StftConfig& stft,
                           const BaselineProgressFn& progress = {});

}  // namespace mvae

#endif  // MVAE_BASELINE_HPP_
