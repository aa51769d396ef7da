// Copyright 2026 The lgtomo Authors
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

// Traceless Hermitian orthonormal operator basis (generalized Gell-Mann
// matrices with Tr(G_i G_j) = delta_ij) and the decompositions
//   rho = 1/d + sum_i a_i G_i,     Pi = b + sum_i c_i G_i.

#include <cmath>
#include <cstddef>
#include <vector>

#include "lgtomo/linalg.hpp"

namespace lgtomo {

class OperatorBasis {
 public:
  OperatorBasis() = default;
  OperatorBasis(std::size_t dim, std::vector<CMatrix> gammas) : dim_(dim), gammas_(std::move(gammas)) {}

  std::size_t dim() const { return dim_; }
  /// Number of generators, d^2 - 1.
  std::size_t size() const { return gammas_.size(); }
  const CMatrix& operator[](std::size_t i) const { return gammas_[i]; }
  const std::vector<CMatrix>& gammas() const { return gammas_; }

 private:
  std::size_t dim_ = 0;
  std::vector<CMatrix> gammas_;
};

/// Ordering: symmetric pairs (j<k), antisymmetric pairs (j<k), then diagonal generators.
inline OperatorBasis gell_mann_basis(std::size_t d) {
  require(d >= 1, "gell_mann_basis: dimension must be positive");
  const auto n = static_cast<Eigen::Index>(d);
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<CMatrix> gammas;
  gammas.reserve(d * d - 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      CMatrix g = CMatrix::Zero(n, n);
      g(j, k) = g(k, j) = s;
      gammas.push_back(std::move(g));
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      CMatrix g = CMatrix::Zero(n, n);
      g(j, k) = Complex(0.0, -s);
      g(k, j) = Complex(0.0, s);
      gammas.push_back(std::move(g));
    }
  }
  for (Eigen::Index l = 1; l < n; ++l) {
    CMatrix g = CMatrix::Zero(n, n);
    const double w = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (Eigen::Index j = 0; j < l; ++j) g(j, j) = w;
    g(l, l) = -static_cast<double>(l) * w;
    gammas.push_back(std::move(g));
  }
  return OperatorBasis(d, std::move(gammas));
}

/// Real coefficients a_i of a state in the traceless basis.
struct BlochVector {
  RVector a;
};

/// Hermitian, positive semidefinite, unit-trace matrix. Validated on construction.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  DensityMatrix() = default;

  explicit DensityMatrix(CMatrix rho, double tol = kTolerance) : rho_(std::move(rho)) {
    require(rho_.rows() == rho_.cols() && rho_.rows() > 0, "DensityMatrix: must be square and nonempty");
    require(linalg::hermiticity_defect(rho_) <= tol, "DensityMatrix: not Hermitian");
    require(std::abs(rho_.trace() - Complex(1.0)) <= tol, "DensityMatrix: trace differs from 1");
    require(linalg::min_eigenvalue(rho_) >= -tol, "DensityMatrix: negative eigenvalue");
  }

  static DensityMatrix maximally_mixed(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    return DensityMatrix(CMatrix::Identity(n, n) / static_cast<double>(d));
  }

  /// Projector onto a (not necessarily normalized) state vector.
  static DensityMatrix pure(const CVector& psi) {
    require(psi.norm() > 0.0, "DensityMatrix::pure: zero vector");
    const CVector v = psi / psi.norm();
    return DensityMatrix(v * v.adjoint());
  }

  const CMatrix& matrix() const { return rho_; }
  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }

 private:
  CMatrix rho_;
};

struct PovmComponents {
  double b = 0.0;
  RVector c;
};

inline BlochVector bloch_decompose(const DensityMatrix& rho, const OperatorBasis& basis) {
  require_same_dim(static_cast<Eigen::Index>(rho.dim()), static_cast<Eigen::Index>(basis.dim()),
                   "bloch_decompose");
  RVector a(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    a(static_cast<Eigen::Index>(i)) = linalg::trace_product(rho.matrix(), basis[i]).real();
  return {std::move(a)};
}

/// 1/d + sum a_i G_i. The result is Hermitian and unit-trace but not necessarily PSD.
inline CMatrix bloch_recompose(const BlochVector& v, const OperatorBasis& basis) {
  require_same_dim(v.a.size(), static_cast<Eigen::Index>(basis.size()), "bloch_recompose");
  const auto n = static_cast<Eigen::Index>(basis.dim());
  CMatrix m = CMatrix::Identity(n, n) / static_cast<double>(basis.dim());
  for (std::size_t i = 0; i < basis.size(); ++i) m += v.a(static_cast<Eigen::Index>(i)) * basis[i];
  return m;
}

inline PovmComponents povm_decompose(const CMatrix& pi, const OperatorBasis& basis) {
  require(pi.rows() == pi.cols(), "povm_decompose: matrix not square");
  require_same_dim(pi.rows(), static_cast<Eigen::Index>(basis.dim()), "povm_decompose");
  PovmComponents out;
  out.b = pi.trace().real() / static_cast<double>(basis.dim());
  out.c.resize(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    out.c(static_cast<Eigen::Index>(i)) = linalg::trace_product(pi, basis[i]).real();
  return out;
}

inline CMatrix povm_recompose(const PovmComponents& comp, const OperatorBasis& basis) {
  require_same_dim(comp.c.size(), static_cast<Eigen::Index>(basis.size()), "povm_recompose");
  const auto n = static_cast<Eigen::Index>(basis.dim());
  CMatrix m = comp.b * CMatrix::Identity(n, n);
  for (std::size_t i = 0; i < basis.size(); ++i) m += comp.c(static_cast<Eigen::Index>(i)) * basis[i];
  return m;
}

}  // namespace lgtomo
