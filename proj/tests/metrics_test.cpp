// tests/metrics_test.cpp

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

#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mvae/error.hpp"

namespace mvae {
namespace {

std::vector<double> RandomSignal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = nd(rng);
  return x;
}

// Component of b orthogonal to a, rescaled to the energy of a.
std::vector<double> OrthogonalEqualPower(const std::vector<double>& a, std::vector<double> b) {
  double ab = 0.0, aa = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
  }
  double bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    b[i] -= ab / aa * a[i];
    bb += b[i] * b[i];
  }
  for (double& v : b) v *= std::sqrt(aa / bb);
  return b;
}

TEST(SiSdrTest, PerfectEstimateIsCapped) {
  std::mt19937_64 rng(91);
  const auto x = RandomSignal(rng, 1000);
  EXPECT_EQ(SiSdr(x, x), kSiSdrCap);
}

TEST(SiSdrTest, ScaleInvariant) {
  std::mt19937_64 rng(92);
  const auto x = RandomSignal(rng, 1000);
  std::vector<double> y = x;
  for (double& v : y) v *= 2.0;
  EXPECT_EQ(SiSdr(x, y), kSiSdrCap);
  const auto n = RandomSignal(rng, 1000);
  std::vector<double> e(1000), e3(1000);
  for (int i = 0; i < 1000; ++i) {
    e[i] = x[i] + 0.3 * n[i];
    e3[i] = -3.0 * e[i];
  }
  EXPECT_NEAR(SiSdr(x, e), SiSdr(x, e3), 1e-10);
}

TEST(SiSdrTest, OrthogonalEqualPowerIsZeroDb) {
  std::mt19937_64 rng(93);
  const auto x = RandomSignal(rng, 2000);
  const auto n = OrthogonalEqualPower(x, RandomSignal(rng, 2000));
  std::vector<double> e(2000);
  for (int i = 0; i < 2000; ++i) e[i] = x[i] + n[i];
  EXPECT_NEAR(SiSdr(x, e), 0.0, 1e-6);
  for (int i = 0; i < 2000; ++i) e[i] = x[i] + 0.1 * n[i];
  EXPECT_NEAR(SiSdr(x, e), 20.0, 1e-6);
}

TEST(SiSdrTest, ZeroEstimateIsFloor) {
  const std::vector<double> x = {1.0, -2.0, 3.0};
  EXPECT_EQ(SiSdr(x, std::vector<double>(3, 0.0)), -kSiSdrCap);
}

TEST(SiSdrTest, Errors) {
  EXPECT_THROW(SiSdr(std::vector<double>(3, 0.0), std::vector<double>(3, 1.0)), ConfigError);
  EXPECT_THROW(SiSdr(std::vector<double>(3, 1.0), std::vector<double>(4, 1.0)), ConfigError);
}

TEST(EvaluateTest, ChannelMeanAndImprovement) {
  std::mt19937_64 rng(94);
  Waveform ref, est, mix;
  for (int c = 0; c < 2; ++c) {
    const auto x = RandomSignal(rng, 1500);
    const auto n = OrthogonalEqualPower(x, RandomSignal(rng, 1500));
    std::vector<double> e(1500), m(1500);
    const double scale = c == 0 ? 0.1 : 0.01;
    for (int i = 0; i < 1500; ++i) {
      e[i] = x[i] + scale * n[i];
      m[i] = x[i] + n[i];
    }
    ref.channels.push_back(x);
    est.channels.push_back(e);
    mix.channels.push_back(m);
  }
  const EvalReport r = Evaluate(ref, est, &mix);
  ASSERT_EQ(r.per_channel_out.size(), 2u);
  EXPECT_NEAR(r.per_channel_out[0], 20.0, 1e-6);
  EXPECT_NEAR(r.per_channel_out[1], 40.0, 1e-6);
  EXPECT_NEAR(r.si_sdr_out, 30.0, 1e-6);
  ASSERT_TRUE(r.si_sdr_in.has_value());
  EXPECT_NEAR(*r.si_sdr_in, 0.0, 1e-6);
  EXPECT_NEAR(*r.improvement, 30.0, 1e-6);
  EXPECT_NEAR(SiSdr(ref, est), 30.0, 1e-6);
  const EvalReport no_mix = Evaluate(ref, est);
  EXPECT_FALSE(no_mix.si_sdr_in.has_value());
  EXPECT_FALSE(no_mix.improvement.has_value());
  const auto j = nlohmann::json::parse(ReportToJson(r));
  EXPECT_NEAR(j.at("si_sdr_out").get<double>(), 30.0, 1e-6);
}

TEST(SummaryTest, MedianAndMean) {
  const Summary odd = Summarize({3.0, 1.0, 2.0});
  EXPECT_EQ(odd.median, 2.0);
  EXPECT_EQ(odd.mean, 2.0);
  const Summary even = Summarize({4.0, 1.0, 2.0, 10.0});
  EXPECT_EQ(even.median, 3.0);
  EXPECT_EQ(even.mean, 4.25);
  EXPECT_THROW(Summarize({}), ConfigError);
}

TEST(ReportsTest, JsonAndCsv) {
  EvalReport a;
  a.per_channel_out = {10.0};
  a.si_sdr_out = 10.0;
  a.si_sdr_in = 2.0;
  a.improvement = 8.0;
  EvalReport b;
  b.per_channel_out = {6.0};
  b.si_sdr_out = 6.0;
  b.si_sdr_in = 0.0;
  b.improvement = 6.0;
  const std::vector<NamedReport> reports = {{"a", a}, {"b", b}};
  const auto j = nlohmann::json::parse(ReportsToJson(reports));
  EXPECT_EQ(j.at("items").size(), 2u);
  EXPECT_EQ(j.at("aggregate").at("count").get<int>(), 2);
  EXPECT_EQ(j["aggregate"]["si_sdr_out"]["mean"].get<double>(), 8.0);
  EXPECT_EQ(j["aggregate"]["improvement"]["median"].get<double>(), 7.0);
  const std::string csv = ReportsToCsv(reports);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,si_sdr_in,si_sdr_out,improvement");
  EXPECT_NE(csv.find("\na,"), std::string::npos);
  EvalReport c;
  c.per_channel_out = {1.0};
  c.si_sdr_out = 1.0;
  const std::string csv2 = ReportsToCsv({{"c", c}});
  EXPECT_NE(csv2.find("c,,"), std::string::npos);
}

}  // namespace
}  // namespace mvae
