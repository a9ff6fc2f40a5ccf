// core/src/model.cpp

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
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <json.hpp>

#include "mvae/error.hpp"
#include "mvae/nn.hpp"
#include "parallel.hpp"

namespace mvae {

void UnsupervisedParams::CheckShapes() const {
  const int F = bins();
  const int N = frames();
  if (noise_act.rows() != noise_dict.cols()) throw ConfigError("params: W_b and H_b ranks differ");
  if (static_cast<int>(speech_scm.size()) != F || static_cast<int>(noise_scm.size()) != F) {
    throw ConfigError("params: need one speech and one noise SCM per frequency bin");
  }
  if (static_cast<int>(gain.size()) != N) throw ConfigError("params: need one gain per frame");
  const int I = channels();
  for (int f = 0; f < F; ++f) {
    if (speech_scm[f].dim() != I || noise_scm[f].dim() != I) {
      throw ConfigError("params: SCM dimensions differ across bins");
    }
  }
}

UnsupervisedParams InitialParams(int bins, int frames, int rank, int channels, std::uint64_t seed) {
  if (bins < 1 || frames < 1 || rank < 1) throw ConfigError("params: dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  UnsupervisedParams p;
  p.noise_dict.resize(bins, rank);
  p.noise_act.resize(rank, frames);
  // Fill row-major so the draw order does not depend on Eigen's storage.
  for (int f = 0; f < bins; ++f) {
    for (int k = 0; k < rank; ++k) p.noise_dict(f, k) = u(rng);
  }
  for (int k = 0; k < rank; ++k) {
    for (int n = 0; n < frames; ++n) p.noise_act(k, n) = u(rng);
  }
  p.speech_scm.assign(bins, HermitianMatrix::Identity(channels));
  p.noise_scm.assign(bins, HermitianMatrix::Identity(channels));
  p.gain.assign(frames, 1.0);
  return p;
}

HermitianMatrix SigmaX(const UnsupervisedParams& p, double speech_variance, int f, int n) {
  HermitianMatrix sigma = (p.gain[n] * speech_variance) * p.speech_scm[f];
  sigma.AddScaled(p.NoiseVariance(f, n), p.noise_scm[f]);
  return sigma;
}

HermitianMatrix SigmaX(const UnsupervisedParams& p, std::span<const double> speech_variances,
                       int f, int n) {
  return SigmaX(p, speech_variances[f], f, n);
}

DensityTerms GaussianTerms(std::span<const Complex> x, const HermitianMatrix& sigma) {
  const int dim = sigma.dim();
  if (dim == 1) {
    const double s = sigma(0, 0).real();
    if (!(s > 0.0)) throw SingularMatrixError("gaussian density: non-positive variance");
    return {std::log(s), std::norm(x[0]) / s};
  }
  if (dim == 2) {
    const double a = sigma(0, 0).real();
    const double d = sigma(1, 1).real();
    const Complex b = sigma(0, 1);
    const double det = a * d - std::norm(b);
    if (!(det > 0.0)) throw SingularMatrixError("gaussian density: covariance is not PD");
    const double quad =
        (d * std::norm(x[0]) + a * std::norm(x[1]) - 2.0 * (b * std::conj(x[0]) * x[1]).real()) / det;
    return {std::log(det), quad};
  }
  Eigen::LLT<ComplexMatrix> llt(sigma.matrix());
  if (llt.info() != Eigen::Success) throw SingularMatrixError("gaussian density: covariance is not PD");
  ComplexVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = x[i];
  const ComplexVector w = llt.matrixL().solve(v);
  double log_det = 0.0;
  for (int i = 0; i < dim; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i).real());
  return {log_det, w.squaredNorm()};
}

double LogLikelihood(std::span<const Complex> x, const HermitianMatrix& sigma) {
  if (static_cast<int>(x.size()) != sigma.dim()) throw ConfigError("log-likelihood: dimension mismatch");
  const DensityTerms t = GaussianTerms(x, sigma);
  return -sigma.dim() * std::log(std::numbers::pi) - t.log_det - t.quad;
}

UnsupervisedParams Normalize(UnsupervisedParams p) {
  for (int f = 0; f < p.bins(); ++f) {
    const double t = p.noise_scm[f].Trace();
    p.noise_scm[f] *= 1.0 / t;
    p.noise_dict.row(f) *= t;
  }
  for (int k = 0; k < p.rank(); ++k) {
    const double s = p.noise_dict.col(k).sum();
    p.noise_dict.col(k) /= s;
    p.noise_act.row(k) *= s;
  }
  return p;
}

namespace {

nlohmann::json MatrixToJson(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd MatrixFromJson(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw FormatError("params: matrix has the wrong number of rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = j[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols) throw FormatError("params: ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[k];
  }
  return m;
}

nlohmann::json ScmsToJson(const std::vector<HermitianMatrix>& scms) {
  nlohmann::json out = nlohmann::json::array();
  for (const HermitianMatrix& r : scms) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < r.dim(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < r.dim(); ++j) row.push_back({r(i, j).real(), r(i, j).imag()});
      rows.push_back(row);
    }
    out.push_back(rows);
  }
  return out;
}

std::vector<HermitianMatrix> ScmsFromJson(const nlohmann::json& j, int bins, int channels) {
  if (!j.is_array() || static_cast<int>(j.size()) != bins) throw FormatError("params: SCM count mismatch");
  std::vector<HermitianMatrix> out;
  out.reserve(bins);
  for (const auto& rows : j) {
    if (static_cast<int>(rows.size()) != channels) throw FormatError("params: SCM size mismatch");
    ComplexMatrix m(channels, channels);
    for (int i = 0; i < channels; ++i) {
      if (static_cast<int>(rows[i].size()) != channels) throw FormatError("params: SCM size mismatch");
      for (int k = 0; k < channels; ++k) {
        m(i, k) = Complex(rows[i][k].at(0).get<double>(), rows[i][k].at(1).get<double>());
      }
    }
    out.push_back(Hermitize(m));
  }
  return out;
}

}  // namespace

std::string ParamsToJson(const UnsupervisedParams& p) {
  nlohmann::json j = {{"bins", p.bins()},
                      {"frames", p.frames()},
                      {"rank", p.rank()},
                      {"channels", p.channels()},
                      {"noise_dict", MatrixToJson(p.noise_dict)},
                      {"noise_act", MatrixToJson(p.noise_act)},
                      {"gain", p.gain},
                      {"speech_scm", ScmsToJson(p.speech_scm)},
                      {"noise_scm", ScmsToJson(p.noise_scm)}};
  return j.dump();
}

UnsupervisedParams ParamsFromJson(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    const int F = j.at("bins").get<int>();
    const int N = j.at("frames").get<int>();
    const int K = j.at("rank").get<int>();
    const int I = j.at("channels").get<int>();
    UnsupervisedParams p;
    p.noise_dict = MatrixFromJson(j.at("noise_dict"), F, K);
    p.noise_act = MatrixFromJson(j.at("noise_act"), K, N);
    p.gain = j.at("gain").get<std::vector<double>>();
    p.speech_scm = ScmsFromJson(j.at("speech_scm"), F, I);
    p.noise_scm = ScmsFromJson(j.at("noise_scm"), F, I);
    p.CheckShapes();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("params: malformed JSON: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(e.what());
  }
}

void SaveParams(const UnsupervisedParams& p, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << ParamsToJson(p) << '\n';
  if (!os) throw IoError("failed writing " + path.string());
}

UnsupervisedParams LoadParams(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParamsFromJson(ss.str());
}

LatentChain::LatentChain(int frames, int latent_dim)
    : frames_(frames),
      latent_dim_(latent_dim),
      state_(static_cast<std::size_t>(frames) * latent_dim, 0.0),
      log_target_(frames, 0.0) {
  if (frames < 0 || latent_dim < 1) throw ConfigError("latent chain: invalid dimensions");
}

void LatentChain::ResetSamples(int count) {
  if (count < 0) throw ConfigError("latent chain: negative sample count");
  kept_ = count;
  samples_.assign(static_cast<std::size_t>(count) * state_.size(), 0.0);
}

void LatentChain::StoreSample(int r) {
  if (r < 0 || r >= kept_) throw ConfigError("latent chain: sample slot out of range");
  std::copy(state_.begin(), state_.end(), samples_.begin() + static_cast<std::ptrdiff_t>(r * state_.size()));
}

SpeechVariances::SpeechVariances(int samples, int frames, int bins, double fill)
    : samples_(samples),
      frames_(frames),
      bins_(bins),
      data_(static_cast<std::size_t>(samples) * frames * bins, fill) {}

SpeechVariances DecodeSamples(const Vae& vae, const LatentChain& chain) {
  if (chain.latent_dim() != vae.latent_dim()) throw ConfigError("chain and decoder latent sizes differ");
  SpeechVariances out(chain.kept(), chain.frames(), vae.spectrum_dim());
  const int N = chain.frames();
  internal::ParallelFor(chain.kept() * N, [&](int idx) {
    const int r = idx / N;
    const int n = idx % N;
    vae.DecoderForward(chain.sample(r, n), out.at(r, n));
  });
  return out;
}

}  // namespace mvae
