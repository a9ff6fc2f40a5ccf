// core/src/kernels.hpp

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

#ifndef MVAE_SRC_KERNELS_HPP_
#define MVAE_SRC_KERNELS_HPP_

// Per-bin kernels for the inner loops over (r, f, n). The channel count is a
// template parameter: 1 and 2 get fixed-size Eigen types (and closed forms),
// everything else goes through the dynamic path.

#include <cmath>
#include <span>
#include <type_traits>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mvae/error.hpp"
#include "mvae/hermitian.hpp"

namespace mvae::internal {

template <int N>
using Mat = Eigen::Matrix<Complex, N, N, 0, N == Eigen::Dynamic ? kMaxChannels : N,
                          N == Eigen::Dynamic ? kMaxChannels : N>;
template <int N>
using Vec = Eigen::Matrix<Complex, N, 1, 0, N == Eigen::Dynamic ? kMaxChannels : N, 1>;

template <typename Fn>
decltype(auto) DispatchChannels(int channels, Fn&& fn) {
  if (channels == 2) return fn(std::integral_constant<int, 2>{});
  if (channels == 1) return fn(std::integral_constant<int, 1>{});
  return fn(std::integral_constant<int, Eigen::Dynamic>{});
}

template <int N>
Mat<N> Load(const HermitianMatrix& h) {
  return h.matrix();
}

template <int N>
Vec<N> Load(std::span<const Complex> x) {
  Vec<N> v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(i) = x[i];
  return v;
}

// Inverse of a Hermitian matrix. Singular input (|det| < kSingularDet) either
// throws SingularMatrixError or, with regularize, has its eigenvalues lifted
// first as InverseRegularized does.
template <int N>
Mat<N> InverseOf(const Mat<N>& m, bool regularize) {
  if constexpr (N == 1) {
    const double a = m(0, 0).real();
    if (std::abs(a) >= kSingularDet) {
      Mat<1> inv;
      inv(0, 0) = 1.0 / a;
      return inv;
    }
  } else if constexpr (N == 2) {
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const Complex b = m(0, 1);
    const double det = a * d - std::norm(b);
    if (std::abs(det) >= kSingularDet) {
      Mat<2> inv;
      inv(0, 0) = d / det;
      inv(1, 1) = a / det;
      inv(0, 1) = -b / det;
      inv(1, 0) = std::conj(inv(0, 1));
      return inv;
    }
  }
  const HermitianMatrix h = Hermitize(m);
  return (regularize ? InverseRegularized(h) : Inverse(h)).matrix();
}

// x^H A x for Hermitian A.
template <int N>
double Quad(const Mat<N>& a, const Vec<N>& x) {
  return (x.adjoint() * a * x)(0, 0).real();
}

// tr(A B) for Hermitian A, B.
template <int N>
double TraceOfProduct(const Mat<N>& a, const Mat<N>& b) {
  return (a.array() * b.transpose().array()).sum().real();
}

// ln det(sigma) and x^H sigma^{-1} x; throws SingularMatrixError when sigma
// is not PD.
template <int N>
void LogDetQuad(const Mat<N>& sigma, const Vec<N>& x, double& log_det, double& quad) {
  if constexpr (N == 1) {
    const double s = sigma(0, 0).real();
    if (!(s > 0.0)) throw SingularMatrixError("gaussian density: non-positive variance");
    log_det = std::log(s);
    quad = std::norm(x(0)) / s;
  } else if constexpr (N == 2) {
    const double a = sigma(0, 0).real();
    const double d = sigma(1, 1).real();
    const Complex b = sigma(0, 1);
    const double det = a * d - std::norm(b);
    if (!(det > 0.0) || !(a > 0.0)) throw SingularMatrixError("gaussian density: covariance is not PD");
    log_det = std::log(det);
    quad = (d * std::norm(x(0)) + a * std::norm(x(1)) - 2.0 * (b * std::conj(x(0)) * x(1)).real()) / det;
  } else {
    Eigen::LLT<Mat<N>> llt(sigma);
    if (llt.info() != Eigen::Success) throw SingularMatrixError("gaussian density: covariance is not PD");
    const Vec<N> w = llt.matrixL().solve(x);
    log_det = 0.0;
    for (Eigen::Index i = 0; i < sigma.rows(); ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i).real());
    quad = w.squaredNorm();
  }
}

}  // namespace mvae::internal

#endif  // MVAE_SRC_KERNELS_HPP_
