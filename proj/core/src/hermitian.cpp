// core/src/hermitian.cpp

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

#include "mvae/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "mvae/error.hpp"

namespace mvae {

namespace {

void CheckDim(int dim) {
  if (dim < 1 || dim > kMaxChannels) {
    throw ConfigError("matrix dimension " + std::to_string(dim) + " outside [1, " +
                      std::to_string(kMaxChannels) + "]");
  }
}

// Closed-form eigendecomposition of [[a, b], [conj(b), d]].
HermitianEigen Eigen2(const ComplexMatrix& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const Complex b = m(0, 1);
  const double mean = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double h = std::hypot(half_diff, std::abs(b));

  HermitianEigen eig;
  eig.values.resize(2);
  eig.values << mean - h, mean + h;
  eig.vectors.resize(2, 2);
  if (h == 0.0) {
    eig.vectors.setIdentity();
    return eig;
  }
  // Eigenvector of the larger eigenvalue, taking whichever row of
  // (M - lambda I) is better conditioned.
  const double lambda = mean + h;
  Complex p, q;
  if (a >= d) {
    p = lambda - d;
    q = std::conj(b);
  } else {
    p = b;
    q = lambda - a;
  }
  const double norm = std::sqrt(std::norm(p) + std::norm(q));
  p /= norm;
  q /= norm;
  eig.vectors(0, 1) = p;
  eig.vectors(1, 1) = q;
  eig.vectors(0, 0) = -std::conj(q);
  eig.vectors(1, 0) = std::conj(p);
  return eig;
}

}  // namespace

HermitianMatrix HermitianMatrix::Identity(int dim) {
  CheckDim(dim);
  ComplexMatrix m = ComplexMatrix::Identity(dim, dim);
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::Zero(int dim) {
  CheckDim(dim);
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::Diagonal(std::span<const double> diag) {
  const int dim = static_cast<int>(diag.size());
  CheckDim(dim);
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) m(i, i) = diag[i];
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::Outer(std::span<const Complex> x) {
  const int dim = static_cast<int>(x.size());
  CheckDim(dim);
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    m(i, i) = std::norm(x[i]);
    for (int j = i + 1; j < dim; ++j) {
      m(i, j) = x[i] * std::conj(x[j]);
      m(j, i) = std::conj(m(i, j));
    }
  }
  return HermitianMatrix(std::move(m));
}

double HermitianMatrix::Trace() const {
  double t = 0.0;
  for (int i = 0; i < dim(); ++i) t += m_(i, i).real();
  return t;
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& other) {
  m_ += other.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& other) {
  m_ -= other.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

void HermitianMatrix::AddScaled(double s, const HermitianMatrix& other) {
  m_ += s * other.m_;
}

HermitianMatrix Hermitize(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw ConfigError("hermitize: matrix is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + ", expected square");
  }
  const int dim = static_cast<int>(m.rows());
  CheckDim(dim);
  ComplexMatrix h(dim, dim);
  for (int i = 0; i < dim; ++i) {
    h(i, i) = Complex(m(i, i).real(), 0.0);
    for (int j = i + 1; j < dim; ++j) {
      h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
      h(j, i) = std::conj(h(i, j));
    }
  }
  return HermitianMatrix(std::move(h));
}

HermitianMatrix Inverse(const HermitianMatrix& m, double ridge) {
  if (ridge < 0.0) throw ConfigError("inverse: negative ridge");
  const int dim = m.dim();
  if (dim == 2) {
    const double a = m(0, 0).real() + ridge;
    const double d = m(1, 1).real() + ridge;
    const Complex b = m(0, 1);
    const double det = a * d - std::norm(b);
    if (!(std::abs(det) >= kSingularDet)) {
      throw SingularMatrixError("inverse: singular 2x2 matrix (det=" + std::to_string(det) + ")");
    }
    ComplexMatrix inv(2, 2);
    inv(0, 0) = d / det;
    inv(1, 1) = a / det;
    inv(0, 1) = -b / det;
    inv(1, 0) = std::conj(inv(0, 1));
    return Hermitize(inv);
  }
  ComplexMatrix shifted = m.matrix();
  shifted.diagonal().array() += ridge;
  Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
  const double det = std::abs(lu.determinant());
  if (!(det >= kSingularDet)) {
    throw SingularMatrixError("inverse: singular matrix (|det|=" + std::to_string(det) + ")");
  }
  return Hermitize(lu.inverse());
}

HermitianMatrix InverseRegularized(const HermitianMatrix& m) {
  try {
    return Inverse(m);
  } catch (const SingularMatrixError&) {
    return Inverse(ClampToPd(m));
  }
}

HermitianEigen EigenDecompose(const HermitianMatrix& m) {
  if (m.dim() == 2) return Eigen2(m.matrix());
  if (m.dim() == 1) {
    HermitianEigen eig;
    eig.values.resize(1);
    eig.values(0) = m(0, 0).real();
    eig.vectors = ComplexMatrix::Identity(1, 1);
    return eig;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition failed to converge");
  }
  return HermitianEigen{solver.eigenvalues(), solver.eigenvectors()};
}

HermitianMatrix PsdSqrt(const HermitianMatrix& m) {
  if (m.dim() == 1) {
    const double s = std::sqrt(std::max(m(0, 0).real(), 0.0));
    return HermitianMatrix::Diagonal(std::span<const double>(&s, 1));
  }
  return ApplySpectral(EigenDecompose(m), [](double l) { return std::sqrt(std::max(l, 0.0)); });
}

HermitianMatrix ClampToPd(const HermitianMatrix& m) {
  const HermitianEigen eig = EigenDecompose(m);
  const double largest = eig.values.cwiseAbs().maxCoeff();
  double floor = kPsdRelTol * largest;
  if (!(floor > 0.0)) floor = std::numeric_limits<double>::min();
  if (eig.values.minCoeff() >= floor) return m;
  return ApplySpectral(eig, [floor](double l) { return std::max(l, floor); });
}

HermitianMatrix SolveRiccati(const HermitianMatrix& psi, const HermitianMatrix& phi) {
  if (psi.dim() != phi.dim()) throw ConfigError("riccati: dimension mismatch");
  const HermitianEigen eig = EigenDecompose(psi);
  double det = 1.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) det *= eig.values(i);
  if (!(eig.values.minCoeff() > 0.0) || !(det >= kSingularDet)) {
    throw SingularMatrixError("riccati: coefficient matrix is not positive definite");
  }
  const HermitianMatrix root = ApplySpectral(eig, [](double l) { return std::sqrt(l); });
  const HermitianMatrix inv_root = ApplySpectral(eig, [](double l) { return 1.0 / std::sqrt(l); });
  // R = psi^{-1/2} (psi^{1/2} phi psi^{1/2})^{1/2} psi^{-1/2}, formed as B B^H
  // with B = psi^{-1/2} (...)^{1/4} so that rank-deficient phi still gives a
  // PSD result after rounding.
  const HermitianMatrix quarter =
      ApplySpectral(EigenDecompose(Sandwich(root, phi)), [](double l) { return std::sqrt(std::sqrt(std::max(l, 0.0))); });
  const ComplexMatrix b = inv_root.matrix() * quarter.matrix();
  return Hermitize(b * b.adjoint());
}

double LogDet(const HermitianMatrix& m) {
  const int dim = m.dim();
  if (dim == 1) {
    const double v = m(0, 0).real();
    if (!(v > 0.0)) throw SingularMatrixError("log-det of non-positive scalar");
    return std::log(v);
  }
  if (dim == 2) {
    const double det = m(0, 0).real() * m(1, 1).real() - std::norm(m(0, 1));
    if (!(det > 0.0)) throw SingularMatrixError("log-det of non-PD 2x2 matrix");
    return std::log(det);
  }
  Eigen::LLT<ComplexMatrix> llt(m.matrix());
  if (llt.info() != Eigen::Success) throw SingularMatrixError("log-det of non-PD matrix");
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc += std::log(llt.matrixL()(i, i).real());
  return 2.0 * acc;
}

double QuadForm(const HermitianMatrix& m, std::span<const Complex> x) {
  const int dim = m.dim();
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) {
    acc += m(i, i).real() * std::norm(x[i]);
    for (int j = i + 1; j < dim; ++j) {
      acc += 2.0 * (std::conj(x[i]) * m(i, j) * x[j]).real();
    }
  }
  return acc;
}

double TraceProduct(const HermitianMatrix& a, const HermitianMatrix& b) {
  const int dim = a.dim();
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) acc += (a(i, j) * b(j, i)).real();
  }
  return acc;
}

HermitianMatrix Sandwich(const HermitianMatrix& a, const HermitianMatrix& b) {
  ComplexMatrix out = a.matrix() * b.matrix() * a.matrix();
  return Hermitize(out);
}

double FrobeniusDistance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).norm();
}

void Multiply(const HermitianMatrix& m, std::span<const Complex> x, std::span<Complex> y) {
  const int dim = m.dim();
  for (int i = 0; i < dim; ++i) {
    Complex acc = 0.0;
    for (int j = 0; j < dim; ++j) acc += m(i, j) * x[j];
    y[i] = acc;
  }
}

}  // namespace mvae
