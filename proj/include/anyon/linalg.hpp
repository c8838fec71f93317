// Copyright 2026 The anyonsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

namespace anyon {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Largest entry of |A^dagger A - I|.
template <typename Derived>
double unitarity_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) return INFINITY;
  if (m.size() == 0) return 0.0;
  using Scalar = typename Derived::Scalar;
  const auto n = m.rows();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> prod = m.adjoint() * m;
  return (prod - Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n))
      .cwiseAbs()
      .maxCoeff();
}

template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
double symmetry_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

/// Eigenvalues of the Hermitian part, ascending.
template <typename Derived>
RVector hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return RVector();
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  const RVector ev = hermitian_eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev.minCoeff();
}

/// Trace distance (1/2)||A - B||_1 for Hermitian arguments of equal shape.
template <typename DerivedA, typename DerivedB>
double trace_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  const CMatrix diff = a - b;
  return 0.5 * hermitian_eigenvalues(diff).cwiseAbs().sum();
}

}  // namespace anyon
