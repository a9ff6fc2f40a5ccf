// core/include/mvae/hermitian.hpp

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

#ifndef MVAE_HERMITIAN_HPP_
#define MVAE_HERMITIAN_HPP_

#include <complex>
#include <span>

#include <Eigen/Core>

namespace mvae {

using Complex = std::complex<double>;

// Channel counts above this are rejected; storage for every small matrix is
// inline (no heap traffic in the per-bin inner loops).
inline constexpr int kMaxChannels = 8;

using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                    Eigen::ColMajor, kMaxChannels, kMaxChannels>;
using ComplexVector =
    Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxChannels, 1>;
using RealVector =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxChannels, 1>;

// Relative eigenvalue floor used whenever a positive definite matrix is
// required: eigenvalues below kPsdRelTol * max|lambda| are lifted to it.
inline constexpr double kPsdRelTol = 1e-9;
// |det| below this after ridging is treated as singular.
inline constexpr double kSingularDet = 1e-30;

// I x I complex Hermitian matrix. The stored entries satisfy
// m(i, j) == conj(m(j, i)) exactly and the diagonal is exactly real.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  static HermitianMatrix Identity(int dim);
  static HermitianMatrix Zero(int dim);
  static HermitianMatrix Diagonal(std::span<const double> diag);
  // x x^H
  static HermitianMatrix Outer(std::span<const Complex> x);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

  double Trace() const;

  HermitianMatrix& operator+=(const HermitianMatrix& other);
  HermitianMatrix& operator-=(const HermitianMatrix& other);
  HermitianMatrix& operator*=(double s);
  // this += s * other, no temporaries.
  void AddScaled(double s, const HermitianMatrix& other);

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) {
    a += b;
    return a;
  }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) {
    a -= b;
    return a;
  }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) {
    a *= s;
    return a;
  }

 private:
  friend HermitianMatrix Hermitize(const ComplexMatrix& m);
  explicit HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {}

  ComplexMatrix m_;
};

// (M + M^H) / 2. Throws ConfigError for non-square or oversized input.
HermitianMatrix Hermitize(const ComplexMatrix& m);

// (M + ridge * I)^{-1}, re-hermitized. Closed form for I = 2.
// Throws SingularMatrixError when |det| < kSingularDet after ridging.
HermitianMatrix Inverse(const HermitianMatrix& m, double ridge = 0.0);

// Inverse of a matrix that is supposed to be PD; if it is numerically
// singular the eigenvalues are first lifted with ClampToPd.
HermitianMatrix InverseRegularized(const HermitianMatrix& m);

struct HermitianEigen {
  RealVector values;     // ascending
  ComplexMatrix vectors; // columns, orthonormal
};

HermitianEigen EigenDecompose(const HermitianMatrix& m);

// V f(Lambda) V^H for an elementwise function of the eigenvalues.
template <typename Fn>
HermitianMatrix ApplySpectral(const HermitianEigen& eig, Fn&& fn);

// Hermitian PSD S with S * S = M; negative eigenvalues are clamped to 0.
HermitianMatrix PsdSqrt(const HermitianMatrix& m);

// Lifts eigenvalues below kPsdRelTol * max|lambda| to that floor. Returns the
// input unchanged when no eigenvalue needs lifting.
HermitianMatrix ClampToPd(const HermitianMatrix& m);

// Hermitian PSD R with R * psi * R = phi for psi PD and phi PSD:
//   R = psi^{-1/2} sqrt(psi^{1/2} phi psi^{1/2}) psi^{-1/2}.
HermitianMatrix SolveRiccati(const HermitianMatrix& psi, const HermitianMatrix& phi);

// ln det(M) for M PD. Throws SingularMatrixError otherwise.
double LogDet(const HermitianMatrix& m);

// x^H M x (real for Hermitian M).
double QuadForm(const HermitianMatrix& m, std::span<const Complex> x);

// Re tr(A B); exact trace for Hermitian A, B.
double TraceProduct(const HermitianMatrix& a, const HermitianMatrix& b);

// A B A for Hermitian A, B.
HermitianMatrix Sandwich(const HermitianMatrix& a, const HermitianMatrix& b);

// Frobenius norm of A - B.
double FrobeniusDistance(const ComplexMatrix& a, const ComplexMatrix& b);

// y = M x.
void Multiply(const HermitianMatrix& m, std::span<const Complex> x, std::span<Complex> y);

template <typename Fn>
HermitianMatrix ApplySpectral(const HermitianEigen& eig, Fn&& fn) {
  const auto n = eig.values.size();
  RealVector f(n);
  for (Eigen::Index i = 0; i < n; ++i) f(i) = fn(eig.values(i));
  ComplexMatrix out = eig.vectors * f.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return Hermitize(out);
}

}  // namespace mvae

#endif  // MVAE_HERMITIAN_HPP_
