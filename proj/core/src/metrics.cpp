// core/src/metrics.cpp

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

#include "mvae/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mvae/error.hpp"

namespace mvae {

double SiSdr(std::span<const double> reference, std::span<const double> estimate) {
  if (reference.size() != estimate.size()) {
    throw ConfigError("si-sdr: reference has " + std::to_string(reference.size()) +
                      " samples, estimate has " + std::to_string(estimate.size()));
  }
  double rr = 0.0;
  double re = 0.0;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    rr += reference[t] * reference[t];
    re += reference[t] * estimate[t];
  }
  if (!(rr > 0.0)) throw ConfigError("si-sdr: reference is silent");
  const double alpha = re / rr;
  double target = 0.0;
  double residual = 0.0;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    const double s = alpha * reference[t];
    const double e = estimate[t] - s;
    target += s * s;
    residual += e * e;
  }
  // an all-zero (or orthogonal) estimate recovers nothing, even though its
  // residual is zero too
  if (!(target > 0.0)) return -kSiSdrCap;
  if (!(residual > 0.0)) return kSiSdrCap;
  return std::clamp(10.0 * std::log10(target / residual), -kSiSdrCap, kSiSdrCap);
}

namespace {

std::vector<double> PerChannel(const Waveform& reference, const Waveform& estimate) {
  if (reference.num_channels() != estimate.num_channels() || reference.num_channels() == 0) {
    throw ConfigError("si-sdr: channel counts differ (" + std::to_string(reference.num_channels()) +
                      " vs " + std::to_string(estimate.num_channels()) + ")");
  }
  std::vector<double> out;
  for (int i = 0; i < reference.num_channels(); ++i) {
    out.push_back(SiSdr(reference.channels[i], estimate.channels[i]));
  }
  return out;
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

nlohmann::json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json ToJson(const EvalReport& r) {
  return {{"si_sdr_in", OptionalJson(r.si_sdr_in)},
          {"si_sdr_out", r.si_sdr_out},
          {"improvement", OptionalJson(r.improvement)},
          {"per_channel", {{"si_sdr_in", r.per_channel_in}, {"si_sdr_out", r.per_channel_out}}}};
}

}  // namespace

double SiSdr(const Waveform& reference, const Waveform& estimate) {
  return Mean(PerChannel(reference, estimate));
}

EvalReport Evaluate(const Waveform& reference, const Waveform& estimate, const Waveform* mixture) {
  EvalReport r;
  r.per_channel_out = PerChannel(reference, estimate);
  r.si_sdr_out = Mean(r.per_channel_out);
  if (mixture != nullptr) {
    r.per_channel_in = PerChannel(reference, *mixture);
    r.si_sdr_in = Mean(r.per_channel_in);
    r.improvement = r.si_sdr_out - *r.si_sdr_in;
  }
  return r;
}

std::string ReportToJson(const EvalReport& report, int indent) {
  return ToJson(report).dump(indent);
}

Summary Summarize(std::vector<double> values) {
  if (values.empty()) throw ConfigError("cannot summarize an empty set");
  Summary s;
  s.mean = Mean(values);
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  s.median = values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
  return s;
}

std::string ReportsToJson(const std::vector<NamedReport>& reports, int indent) {
  nlohmann::json items = nlohmann::json::array();
  std::vector<double> out;
  std::vector<double> in;
  std::vector<double> gain;
  for (const NamedReport& r : reports) {
    nlohmann::json j = ToJson(r.report);
    j["name"] = r.name;
    items.push_back(j);
    out.push_back(r.report.si_sdr_out);
    if (r.report.si_sdr_in) in.push_back(*r.report.si_sdr_in);
    if (r.report.improvement) gain.push_back(*r.report.improvement);
  }
  nlohmann::json aggregate;
  const auto add = [&aggregate](const char* key, const std::vector<double>& v) {
    if (v.empty()) return;
    const Summary s = Summarize(v);
    aggregate[key] = {{"median", s.median}, {"mean", s.mean}};
  };
  add("si_sdr_in", in);
  add("si_sdr_out", out);
  add("improvement", gain);
  aggregate["count"] = reports.size();
  return nlohmann::json{{"items", items}, {"aggregate", aggregate}}.dump(indent);
}

std::string ReportsToCsv(const std::vector<NamedReport>& reports) {
  std::ostringstream os;
  os.precision(10);
  os << "name,si_sdr_in,si_sdr_out,improvement\n";
  for (const NamedReport& r : reports) {
    os << r.name << ',';
    if (r.report.si_sdr_in) os << *r.report.si_sdr_in;
    os << ',' << r.report.si_sdr_out << ',';
    if (r.report.improvement) os << *r.report.improvement;
    os << '\n';
  }
  return os.str();
}

}  // namespace mvae
