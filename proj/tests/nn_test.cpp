// tests/nn_test.cpp

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

#include "mvae/nn.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mvae/error.hpp"
#include "test_util.hpp"

namespace mvae {
namespace {

DenseLayer Layer(int in, int out, std::vector<float> w, std::vector<float> b, Activation a) {
  DenseLayer l;
  l.in_dim = in;
  l.out_dim = out;
  l.weight = std::move(w);
  l.bias = std::move(b);
  l.activation = a;
  return l;
}

DenseLayer ZeroLayer(int in, int out, Activation a = Activation::kIdentity) {
  return Layer(in, out, std::vector<float>(static_cast<std::size_t>(in) * out, 0.0f),
               std::vector<float>(out, 0.0f), a);
}

// L = 2, F = 3 with a ReLU hidden layer of width 2 in both networks.
VaeWeights HandBuilt() {
  VaeWeights w;
  w.latent_dim = 2;
  w.spectrum_dim = 3;
  w.decoder.layers.push_back(Layer(2, 2, {1.0f, -1.0f, 0.5f, 2.0f}, {0.1f, -0.2f}, Activation::kRelu));
  w.decoder.layers.push_back(
      Layer(2, 3, {1.0f, 0.0f, -0.5f, 1.0f, 0.25f, 0.25f}, {0.0f, 0.3f, -1.0f}, Activation::kIdentity));
  w.encoder.input_standardization = Standardization{{0.5f, -1.0f, 0.0f}, {2.0f, 1.0f, 0.5f}};
  w.encoder.layers.push_back(
      Layer(3, 2, {1.0f, 0.0f, -1.0f, 0.5f, 0.5f, 0.5f}, {0.0f, 0.1f}, Activation::kRelu));
  w.encoder.layers.push_back(Layer(2, 4, {1.0f, 0.0f, 0.0f, 1.0f, -1.0f, 0.5f, 0.2f, -0.3f},
                                   {0.0f, 0.0f, 0.1f, -0.1f}, Activation::kIdentity));
  return w;
}

VaeWeights ZeroVae(int L, int F) {
  VaeWeights w;
  w.latent_dim = L;
  w.spectrum_dim = F;
  w.decoder.layers.push_back(ZeroLayer(L, F));
  w.encoder.layers.push_back(ZeroLayer(F, 2 * L));
  return w;
}

double Relu(double x) { return x > 0.0 ? x : 0.0; }

TEST(DecoderTest, ZeroNetworkGivesUnitVariance) {
  const Vae vae(ZeroVae(4, 7));
  const std::vector<double> z = {0.3, -1.0, 2.0, 5.0};
  for (double v : vae.DecoderForward(z)) EXPECT_EQ(v, 1.0);
}

TEST(DecoderTest, BiasPassesThrough) {
  VaeWeights w = ZeroVae(2, 3);
  w.decoder.layers[0].bias = {0.5f, -2.0f, 1.0f};
  const Vae vae(w);
  const auto v = vae.DecoderForward(std::vector<double>{1.0, 1.0});
  EXPECT_NEAR(v[0], std::exp(0.5), 1e-12);
  EXPECT_NEAR(v[1], std::exp(-2.0), 1e-12);
  EXPECT_NEAR(v[2], std::exp(1.0), 1e-12);
}

TEST(DecoderTest, HandBuiltTwoLayer) {
  const Vae vae(HandBuilt());
  const double z0 = 0.7;
  const double z1 = -0.4;
  const double h0 = Relu(1.0 * z0 - 1.0 * z1 + 0.1);
  const double h1 = Relu(0.5 * z0 + 2.0 * z1 - 0.2);
  const double expected[3] = {std::exp(h0), std::exp(-0.5 * h0 + h1 + 0.3),
                              std::exp(0.25 * h0 + 0.25 * h1 - 1.0)};
  const auto v = vae.DecoderForward(std::vector<double>{z0, z1});
  for (int f = 0; f < 3; ++f) EXPECT_NEAR(v[f], expected[f], 1e-6 * expected[f]);
}

TEST(DecoderTest, VarianceFloor) {
  VaeWeights w = ZeroVae(1, 1);
  w.decoder.layers[0].bias = {-100.0f};
  EXPECT_EQ(Vae(w).DecoderForward(std::vector<double>{0.0})[0], kVarianceFloor);
}

TEST(DecoderTest, WrongLatentSizeThrows) {
  const Vae vae(ZeroVae(2, 3));
  EXPECT_THROW(vae.DecoderForward(std::vector<double>{1.0}), ConfigError);
}

TEST(EncoderTest, ZeroNetworkIsStandardNormal) {
  const Vae vae(ZeroVae(3, 5));
  const auto out = vae.EncoderForward(std::vector<double>(5, 2.0));
  for (int l = 0; l < 3; ++l) {
    EXPECT_EQ(out.mean[l], 0.0);
    EXPECT_EQ(out.variance[l], 1.0);
  }
}

TEST(EncoderTest, StandardizationFixedPoint) {
  // With an identity first layer the encoder output equals its standardized
  // input, which is zero when the log power equals the mean.
  VaeWeights w = ZeroVae(1, 2);
  w.encoder.layers[0].weight = {1.0f, 0.0f, 0.0f, 1.0f};
  w.encoder.input_standardization = Standardization{{1.5f, -3.0f}, {2.0f, 0.5f}};
  const Vae vae(w);
  const std::vector<double> p = {std::exp(1.5f) - kLogFloor, std::exp(-3.0f) - kLogFloor};
  const auto out = vae.EncoderForward(p);
  EXPECT_NEAR(out.mean[0], 0.0, 1e-6);
  EXPECT_NEAR(out.variance[0], 1.0, 1e-6);
}

TEST(EncoderTest, HandBuilt) {
  const Vae vae(HandBuilt());
  const std::vector<double> p = {2.0, 0.1, 7.0};
  double u[3];
  const double mean[3] = {0.5, -1.0, 0.0};
  const double sd[3] = {2.0, 1.0, 0.5};
  for (int f = 0; f < 3; ++f) u[f] = (std::log(p[f] + kLogFloor) - mean[f]) / sd[f];
  const double h0 = Relu(u[0] - u[2]);
  const double h1 = Relu(0.5 * (u[0] + u[1] + u[2]) + 0.1);
  const double mu0 = h0;
  const double mu1 = h1;
  const double lv0 = -h0 + 0.5 * h1 + 0.1;
  const double lv1 = 0.2 * h0 - 0.3 * h1 - 0.1;
  const auto out = vae.EncoderForward(p);
  EXPECT_NEAR(out.mean[0], mu0, 1e-6);
  EXPECT_NEAR(out.mean[1], mu1, 1e-6);
  EXPECT_NEAR(out.variance[0], std::exp(lv0), 1e-6);
  EXPECT_NEAR(out.variance[1], std::exp(lv1), 1e-6);
}

TEST(BatchNormTest, IdentityStatisticsAreNoOp) {
  VaeWeights plain = HandBuilt();
  VaeWeights bn = plain;
  BatchNorm b;
  b.gamma = {1.0f, 1.0f};
  b.beta = {0.0f, 0.0f};
  b.running_mean = {0.0f, 0.0f};
  b.running_var = {1.0f, 1.0f};
  b.epsilon = 0.0f;
  bn.decoder.layers[0].batch_norm = b;
  const std::vector<double> z = {0.2, 0.9};
  const auto a = Vae(plain).DecoderForward(z);
  const auto c = Vae(bn).DecoderForward(z);
  for (int f = 0; f < 3; ++f) EXPECT_NEAR(a[f], c[f], 1e-12);
}

TEST(BatchNormTest, HandEvaluation) {
  VaeWeights w = ZeroVae(1, 1);
  w.decoder.layers[0] = Layer(1, 1, {2.0f}, {1.0f}, Activation::kIdentity);
  BatchNorm b{{3.0f}, {0.5f}, {1.0f}, {4.0f}, 0.0f};
  w.decoder.layers[0].batch_norm = b;
  // a = 2 z + 1 = 2 at z = 0.5; y = 3 (2 - 1) / 2 + 0.5 = 2
  EXPECT_NEAR(Vae(w).DecoderForward(std::vector<double>{0.5})[0], std::exp(2.0), 1e-6);
}

TEST(WeightsFileTest, RoundTripIsBitIdentical) {
  testing::TempDir dir;
  RandomVaeOptions o;
  o.latent_dim = 4;
  o.spectrum_dim = 9;
  o.hidden = {6, 5};
  o.seed = 3;
  VaeWeights w = RandomVae(o);
  w.encoder.input_standardization = Standardization{std::vector<float>(9, 0.25f), std::vector<float>(9, 1.5f)};
  BatchNorm b{std::vector<float>(6, 1.1f), std::vector<float>(6, 0.1f), std::vector<float>(6, -0.2f),
              std::vector<float>(6, 0.9f), 1e-3f};
  w.decoder.layers[0].batch_norm = b;
  SaveVaeWeights(w, dir / "w.bin");
  const VaeWeights r = LoadVaeWeights(dir / "w.bin");
  EXPECT_EQ(r.latent_dim, 4);
  EXPECT_EQ(r.spectrum_dim, 9);
  ASSERT_EQ(r.decoder.layers.size(), w.decoder.layers.size());
  ASSERT_EQ(r.encoder.layers.size(), w.encoder.layers.size());
  for (std::size_t k = 0; k < w.decoder.layers.size(); ++k) {
    EXPECT_EQ(r.decoder.layers[k].weight, w.decoder.layers[k].weight);
    EXPECT_EQ(r.decoder.layers[k].bias, w.decoder.layers[k].bias);
    EXPECT_EQ(r.decoder.layers[k].activation, w.decoder.layers[k].activation);
  }
  for (std::size_t k = 0; k < w.encoder.layers.size(); ++k) {
    EXPECT_EQ(r.encoder.layers[k].weight, w.encoder.layers[k].weight);
    EXPECT_EQ(r.encoder.layers[k].bias, w.encoder.layers[k].bias);
  }
  ASSERT_TRUE(r.decoder.layers[0].batch_norm.has_value());
  EXPECT_EQ(r.decoder.layers[0].batch_norm->running_var, b.running_var);
  EXPECT_EQ(r.decoder.layers[0].batch_norm->epsilon, b.epsilon);
  ASSERT_TRUE(r.encoder.input_standardization.has_value());
  EXPECT_EQ(r.encoder.input_standardization->stddev, w.encoder.input_standardization->stddev);
  // saving again reproduces the same bytes
  SaveVaeWeights(r, dir / "w2.bin");
  std::ifstream a(dir / "w.bin", std::ios::binary);
  std::ifstream c(dir / "w2.bin", std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sc((std::istreambuf_iterator<char>(c)), {});
  EXPECT_EQ(sa, sc);
}

TEST(WeightsFileTest, TruncatedFileIsFormatError) {
  testing::TempDir dir;
  SaveVaeWeights(ZeroVae(2, 3), dir / "w.bin");
  const auto size = std::filesystem::file_size(dir / "w.bin");
  for (auto cut : {size - 1, size / 2, std::uintmax_t{10}, std::uintmax_t{3}}) {
    std::filesystem::copy_file(dir / "w.bin", dir / "t.bin", std::filesystem::copy_options::overwrite_existing);
    std::filesystem::resize_file(dir / "t.bin", cut);
    EXPECT_THROW(LoadVaeWeights(dir / "t.bin"), FormatError) << "cut at " << cut;
  }
}

TEST(WeightsFileTest, MissingFileIsIoError) {
  testing::TempDir dir;
  EXPECT_THROW(LoadVaeWeights(dir / "absent.bin"), IoError);
}

// Rewrites the JSON manifest of a container file, keeping the payload.
void EditManifest(const std::filesystem::path& path, const std::function<void(nlohmann::json&)>& edit) {
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  in.close();
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
  nlohmann::json m = nlohmann::json::parse(bytes.substr(12, len));
  edit(m);
  const std::string text = m.dump();
  std::string out = bytes.substr(0, 8);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((text.size() >> (8 * i)) & 0xff));
  out += text;
  out += bytes.substr(12 + len);
  std::ofstream(path, std::ios::binary) << out;
}

TEST(WeightsFileTest, MismatchedLayerNamesLayer) {
  testing::TempDir dir;
  VaeWeights w = ZeroVae(2, 3);
  w.decoder.layers = {ZeroLayer(2, 4, Activation::kRelu), ZeroLayer(4, 3)};
  SaveVaeWeights(w, dir / "w.bin");
  EditManifest(dir / "w.bin", [](nlohmann::json& m) { m["decoder"]["layers"][1]["in"] = 5; });
  try {
    LoadVaeWeights(dir / "w.bin");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("decoder layer 1"), std::string::npos) << e.what();
  }
}

TEST(WeightsFileTest, WrongTypeIsFormatError) {
  testing::TempDir dir;
  SaveVaeWeights(ZeroVae(2, 3), dir / "w.bin");
  EditManifest(dir / "w.bin", [](nlohmann::json& m) { m["type"] = "something_else"; });
  EXPECT_THROW(LoadVaeWeights(dir / "w.bin"), FormatError);
}

TEST(ValidateTest, InMemoryMismatchNamesLayer) {
  VaeWeights w = ZeroVae(2, 3);
  w.encoder.layers.push_back(ZeroLayer(3, 4));
  try {
    Validate(w);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("encoder layer 1"), std::string::npos) << e.what();
  }
}

TEST(RandomVaeTest, DeterministicAndValid) {
  RandomVaeOptions o;
  o.latent_dim = 3;
  o.spectrum_dim = 11;
  o.hidden = {8};
  o.seed = 42;
  const VaeWeights a = RandomVae(o);
  const VaeWeights b = RandomVae(o);
  EXPECT_NO_THROW(Validate(a));
  EXPECT_EQ(a.decoder.layers[0].weight, b.decoder.layers[0].weight);
  o.zero_encoder = true;
  const Vae z(RandomVae(o));
  const auto out = z.EncoderForward(std::vector<double>(11, 1.0));
  for (int l = 0; l < 3; ++l) EXPECT_EQ(out.variance[l], 1.0);
}

}  // namespace
}  // namespace mvae
