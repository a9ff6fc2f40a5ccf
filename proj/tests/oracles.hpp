// tests/oracles.hpp

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

#ifndef MVAE_TESTS_ORACLES_HPP_
#define MVAE_TESTS_ORACLES_HPP_

// Reference computations written directly from the model equations with
// plain Eigen dense algebra. They do not call the library's numerical code.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "mvae/model.hpp"
#include "mvae/stft.hpp"
#include "test_util.hpp"

namespace mvae::testing {

inline double NoiseVarOracle(const UnsupervisedParams& p, int f, int n) {
  double v = 0.0;
  for (int k = 0; k < p.rank(); ++k) v += p.noise_dict(f, k) * p.noise_act(k, n);
  return v;
}

inline CMat SigmaOracle(const UnsupervisedParams& p, double speech_var, int f, int n) {
  return p.gain[n] * speech_var * ToEigen(p.speech_scm[f]) + NoiseVarOracle(p, f, n) * ToEigen(p.noise_scm[f]);
}

inline CVec BinVector(const MultichannelStft& x, int f, int n) {
  CVec v(x.channels());
  for (int i = 0; i < x.channels(); ++i) v(i) = x.at(i, f, n);
  return v;
}

// sum_r sum_{f,n} x^H Sigma^{-1} x + ln det Sigma, with a generic LU inverse.
inline double CostOracle(const MultichannelStft& x, const UnsupervisedParams& p, const SpeechVariances& v) {
  double c = 0.0;
  for (int r = 0; r < v.samples(); ++r) {
    for (int n = 0; n < x.frames(); ++n) {
      for (int f = 0; f < x.bins(); ++f) {
        const CMat s = SigmaOracle(p, v(r, f, n), f, n);
        const CVec xv = BinVector(x, f, n);
        c += (xv.adjoint() * s.inverse() * xv)(0, 0).real() + std::log(s.determinant().real());
      }
    }
  }
  return c;
}

// Auxiliary variables of the majorizer: Phi[k] for k = 0 (speech) and
// k = 1..K_b (noise components), Omega, per (r, f, n).
struct MmAuxiliaries {
  int samples = 0;
  int bins = 0;
  int frames = 0;
  std::vector<std::vector<CMat>> phi;  // [index(r, f, n)][k]
  std::vector<CMat> omega;             // [index(r, f, n)]

  int Index(int r, int f, int n) const { return (r * frames + n) * bins + f; }
};

// The settings for which the bound is tight.
inline MmAuxiliaries TightAuxiliaries(const UnsupervisedParams& p, const SpeechVariances& v) {
  MmAuxiliaries a;
  a.samples = v.samples();
  a.bins = p.bins();
  a.frames = p.frames();
  a.phi.resize(static_cast<std::size_t>(a.samples) * a.bins * a.frames);
  a.omega.resize(a.phi.size());
  for (int r = 0; r < a.samples; ++r) {
    for (int n = 0; n < a.frames; ++n) {
      for (int f = 0; f < a.bins; ++f) {
        const CMat sigma = SigmaOracle(p, v(r, f, n), f, n);
        const CMat inv = sigma.inverse();
        const int idx = a.Index(r, f, n);
        a.omega[idx] = sigma;
        a.phi[idx].push_back(p.gain[n] * v(r, f, n) * ToEigen(p.speech_scm[f]) * inv);
        for (int k = 0; k < p.rank(); ++k) {
          a.phi[idx].push_back(p.noise_dict(f, k) * p.noise_act(k, n) * ToEigen(p.noise_scm[f]) * inv);
        }
      }
    }
  }
  return a;
}

// G(theta, Phi, Omega): the majorizer of the M-step cost.
inline double MmBound(const MultichannelStft& x, const UnsupervisedParams& p, const SpeechVariances& v,
                      const MmAuxiliaries& a) {
  const int I = x.channels();
  double g = -static_cast<double>(I) * x.bins() * x.frames() * v.samples();
  for (int r = 0; r < v.samples(); ++r) {
    for (int n = 0; n < x.frames(); ++n) {
      for (int f = 0; f < x.bins(); ++f) {
        const int idx = a.Index(r, f, n);
        const CVec xv = BinVector(x, f, n);
        const CMat xx = xv * xv.adjoint();
        const CMat rs = ToEigen(p.speech_scm[f]);
        const CMat rb = ToEigen(p.noise_scm[f]);
        const CMat omega_inv = a.omega[idx].inverse();
        const double sv = p.gain[n] * v(r, f, n);
        const CMat& phi0 = a.phi[idx][0];
        g += (xx * phi0.adjoint() * rs.inverse() * phi0).trace().real() / sv;
        for (int k = 0; k < p.rank(); ++k) {
          const double wh = p.noise_dict(f, k) * p.noise_act(k, n);
          const CMat& phik = a.phi[idx][k + 1];
          g += (xx * phik.adjoint() * rb.inverse() * phik).trace().real() / wh;
          g += wh * (omega_inv * rb).trace().real();
        }
        g += sv * (omega_inv * rs).trace().real();
        g += std::log(a.omega[idx].determinant().real());
      }
    }
  }
  return g;
}

// Direct O(W^2) DFT of one windowed frame, bins 0..W/2.
inline std::vector<Cd> DirectDft(const std::vector<double>& frame) {
  const int w = static_cast<int>(frame.size());
  std::vector<Cd> out(w / 2 + 1);
  for (int k = 0; k <= w / 2; ++k) {
    Cd acc(0.0, 0.0);
    for (int t = 0; t < w; ++t) {
      const double ph = -2.0 * std::numbers::pi * k * t / w;
      acc += frame[t] * Cd(std::cos(ph), std::sin(ph));
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace mvae::testing

#endif  // MVAE_TESTS_ORACLES_HPP_
