// SPDX-License-Identifier: Apache-2.0
//
// mxl-mac: matrix exponential learning for the Gaussian vector MAC
// Copyright (C) 2026 The mxl-mac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MXL_HERMITIAN_HPP
#define MXL_HERMITIAN_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace mxl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Square complex matrix with exact conjugate symmetry.
///
/// Every constructor stores (A + A^H)/2, so entry(i,j) == conj(entry(j,i))
/// holds bit-for-bit and the diagonal is exactly real. Sums, differences and
/// real scalings of Hermitian matrices keep that property and stay in this
/// type; anything else goes through Matrix and back.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(Index dim) : m_(Matrix::Zero(dim, dim)) {
    if (dim < 0) throw std::invalid_argument("HermitianMatrix: negative dimension");
  }

  explicit HermitianMatrix(const Matrix& a) {
    if (a.rows() != a.cols()) {
      throw std::invalid_argument("HermitianMatrix: matrix is " + std::to_string(a.rows()) + "x" +
                                  std::to_string(a.cols()) + ", expected square");
    }
    if (!a.allFinite()) throw std::invalid_argument("HermitianMatrix: non-finite entries");
    m_ = (a + a.adjoint()) * 0.5;
  }

  static HermitianMatrix zero(Index dim) { return HermitianMatrix(dim); }

  static HermitianMatrix identity(Index dim) {
    HermitianMatrix h(dim);
    h.m_.setIdentity();
    return h;
  }

  static HermitianMatrix diagonal(const RVector& d) {
    HermitianMatrix h(d.size());
    for (Index i = 0; i < d.size(); ++i) h.m_(i, i) = d(i);
    return h;
  }

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }

  double trace() const { return m_.diagonal().real().sum(); }
  double norm() const { return m_.norm(); }
  bool all_finite() const { return m_.allFinite(); }

  HermitianMatrix& operator+=(const HermitianMatrix& o) {
    check_same_dim(o);
    m_ += o.m_;
    return *this;
  }
  HermitianMatrix& operator-=(const HermitianMatrix& o) {
    check_same_dim(o);
    m_ -= o.m_;
    return *this;
  }
  HermitianMatrix& operator*=(double s) {
    m_ *= s;
    return *this;
  }

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

  friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.dim() == b.dim() && a.m_ == b.m_;
  }

 private:
  void check_same_dim(const HermitianMatrix& o) const {
    if (o.dim() != dim()) throw std::invalid_argument("HermitianMatrix: dimension mismatch");
  }

  Matrix m_;
};

/// Real trace of A*B for Hermitian A, B.
inline double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_product: dimension mismatch");
  return a.matrix().cwiseProduct(b.matrix().conjugate()).sum().real();
}

struct EigenDecomposition {
  RVector eigenvalues;  // ascending
  Matrix eigenvectors;  // columns

  Index dim() const { return eigenvalues.size(); }
  double max_eigenvalue() const { return eigenvalues(dim() - 1); }
  double min_eigenvalue() const { return eigenvalues(0); }

  /// U f(diag(lambda)) U^H for a scalar function f.
  template <class F>
  HermitianMatrix apply(F&& f) const {
    RVector fl(dim());
    for (Index i = 0; i < dim(); ++i) fl(i) = f(eigenvalues(i));
    return HermitianMatrix(Matrix(eigenvectors * fl.asDiagonal() * eigenvectors.adjoint()));
  }

  HermitianMatrix reconstruct() const {
    return apply([](double x) { return x; });
  }
};

inline EigenDecomposition herm_eig(const HermitianMatrix& a) {
  if (!a.all_finite()) throw std::invalid_argument("herm_eig: non-finite entries");
  if (a.dim() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("herm_eig: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// P * exp(Y) / tr exp(Y), evaluated on the spectrum shifted by lambda_max.
inline HermitianMatrix exp_map(const EigenDecomposition& eig, double power) {
  if (!(power > 0.0)) throw std::invalid_argument("exp_map: power must be positive");
  const double top = eig.max_eigenvalue();
  RVector w = (eig.eigenvalues.array() - top).exp();
  w *= power / w.sum();
  return HermitianMatrix(Matrix(eig.eigenvectors * w.asDiagonal() * eig.eigenvectors.adjoint()));
}

inline HermitianMatrix exp_map(const HermitianMatrix& y, double power) {
  if (!(power > 0.0)) throw std::invalid_argument("exp_map: power must be positive");
  return exp_map(herm_eig(y), power);
}

/// Negative von Neumann entropy tr[Q log Q] of a unit-trace PSD matrix.
inline double von_neumann_entropy(const HermitianMatrix& q) {
  const auto eig = herm_eig(q);
  double h = 0.0;
  for (Index i = 0; i < eig.dim(); ++i) {
    const double x = eig.eigenvalues(i);
    if (x < -1e-10) {
      throw std::domain_error("von_neumann_entropy: eigenvalue " + std::to_string(x) + " is negative");
    }
    if (x > 1e-12) h += x * std::log(x);  // 0 log 0 := 0
  }
  return h;
}

/// log tr exp(Y), the convex conjugate of the entropy on the unit spectrahedron.
inline double entropy_conjugate(const EigenDecomposition& eig) {
  const double top = eig.max_eigenvalue();
  return top + std::log((eig.eigenvalues.array() - top).exp().sum());
}

inline double entropy_conjugate(const HermitianMatrix& y) { return entropy_conjugate(herm_eig(y)); }

/// F(Q, Y) = h(Q) + h*(Y) - tr[QY] for unit-trace Q. Nonnegative, zero iff Q = exp_map(Y, 1).
inline double fenchel_coupling(const HermitianMatrix& q, const HermitianMatrix& y) {
  return von_neumann_entropy(q) + entropy_conjugate(y) - trace_product(q, y);
}

inline HermitianMatrix hermitize(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("hermitize: matrix is not square");
  return HermitianMatrix(a);
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Column k of the
/// result spans the same flag as columns 0..k of the input.
inline Matrix orthonormalize(const Matrix& u) {
  if (!u.allFinite()) throw std::invalid_argument("orthonormalize: non-finite entries");
  Matrix q = u;
  for (Index k = 0; k < q.cols(); ++k) {
    const double original = q.col(k).norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < k; ++j) {
        const Complex c = q.col(j).dot(q.col(k));
        q.col(k) -= c * q.col(j);
      }
    }
    const double n = q.col(k).norm();
    if (!(original > 0.0) || n <= 1e-12 * original) {
      throw std::invalid_argument("orthonormalize: columns are linearly dependent");
    }
    q.col(k) /= n;
  }
  return q;
}

inline double unitarity_residual(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm();
}

// Spectral helpers for positive-definite arguments (W and W_{-k} are >= I).

/// log det via Cholesky; 2 * sum_i log L_ii.
inline double log_det(const HermitianMatrix& a) {
  if (!a.all_finite()) throw std::invalid_argument("log_det: non-finite entries");
  Eigen::LLT<Matrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) throw std::domain_error("log_det: matrix is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

/// B^H A^{-1} B for positive-definite A, via Cholesky.
inline HermitianMatrix inverse_quadratic_form(const HermitianMatrix& a, const Matrix& b) {
  if (b.rows() != a.dim()) throw std::invalid_argument("inverse_quadratic_form: dimension mismatch");
  Eigen::LLT<Matrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) throw std::domain_error("inverse_quadratic_form: matrix is not positive definite");
  const Matrix x = llt.matrixL().solve(b);
  return HermitianMatrix(Matrix(x.adjoint() * x));
}

inline HermitianMatrix inverse(const HermitianMatrix& a) {
  const auto eig = herm_eig(a);
  const RVector mag = eig.eigenvalues.cwiseAbs();
  if (mag.size() == 0 || mag.minCoeff() <= 1e-14 * mag.maxCoeff()) {
    throw std::domain_error("inverse: matrix is singular");
  }
  return eig.apply([](double x) { return 1.0 / x; });
}

inline HermitianMatrix inverse_sqrt(const HermitianMatrix& a) {
  const auto eig = herm_eig(a);
  if (eig.min_eigenvalue() <= 0.0) throw std::domain_error("inverse_sqrt: matrix is not positive definite");
  return eig.apply([](double x) { return 1.0 / std::sqrt(x); });
}

/// Square root of a PSD matrix; tiny negative eigenvalues from roundoff are clamped.
inline Matrix psd_sqrt(const HermitianMatrix& a) {
  const auto eig = herm_eig(a);
  RVector s = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors * s.asDiagonal() * eig.eigenvectors.adjoint();
}

inline double max_eigenvalue(const HermitianMatrix& a) { return herm_eig(a).max_eigenvalue(); }
inline double min_eigenvalue(const HermitianMatrix& a) { return herm_eig(a).min_eigenvalue(); }

}  // namespace mxl

#endif  // MXL_HERMITIAN_HPP
