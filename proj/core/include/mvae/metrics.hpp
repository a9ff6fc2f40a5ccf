// core/include/mvae/metrics.hpp

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

#ifndef MVAE_METRICS_HPP_
#define MVAE_METRICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvae/stft.hpp"

namespace mvae {

// Results are clamped to [-kSiSdrCap, kSiSdrCap] dB.
inline constexpr double kSiSdrCap = 60.0;

// Scale-invariant SDR of one channel: the estimate is projected onto the
// reference, 10 log10(|target|^2 / |residual|^2). Throws ConfigError for
// a zero reference or a length mismatch.
double SiSdr(std::span<const double> reference, std::span<const double> estimate);

// Mean of the per-channel values.
double SiSdr(const Waveform& reference, const Waveform& estimate);

struct EvalReport {
  std::vector<double> per_channel_out;
  std::vector<double> per_channel_in;  // empty without a mixture
  double si_sdr_out = 0.0;
  std::optional<double> si_sdr_in;
  std::optional<double> improvement;  // si_sdr_out - si_sdr_in
};

EvalReport Evaluate(const Waveform& reference, const Waveform& estimate,
                    const Waveform* mixture = nullptr);

std::string ReportToJson(const EvalReport& report, int indent = 2);

struct Summary {
  double median = 0.0;
  double mean = 0.0;
};

// Throws ConfigError for an empty input.
Summary Summarize(std::vector<double> values);

struct NamedReport {
  std::string name;
  EvalReport report;
};

// One object with per-item reports and median / mean aggregates.
std::string ReportsToJson(const std::vector<NamedReport>& reports, int indent = 2);
// name,si_sdr_in,si_sdr_out,improvement with a header line; missing values
// are left empty.
std::string ReportsToCsv(const std::vector<NamedReport>& reports);

}  // namespace mvae

#endif  // MVAE_METRICS_HPP_
