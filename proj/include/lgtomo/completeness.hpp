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

// Informational completeness: the POVM coefficient matrix C, its numerical
// rank against the d^2 - 1 bound, the unmeasured Bloch directions, and
// truncation scans over the ell cutoff.

#include <cstddef>
#include <string>
#include <vector>

#include "lgtomo/induced_povm.hpp"
#include "lgtomo/linalg.hpp"
#include "lgtomo/modes.hpp"
#include "lgtomo/operator_basis.hpp"

namespace lgtomo {

inline constexpr double kDefaultRankTolerance = 1e-9;

struct CoefficientMatrix {
  RMatrix c;  ///< one row per POVM element, d^2 - 1 columns
  RVector b;  ///< b_j = Tr(Pi_j) / d
  std::size_t dim = 0;
};

inline CoefficientMatrix coefficient_matrix(const PovmSet& povm, const OperatorBasis& basis) {
  require_same_dim(static_cast<Eigen::Index>(povm.dim()), static_cast<Eigen::Index>(basis.dim()),
                   "coefficient_matrix");
  CoefficientMatrix out;
  out.dim = basis.dim();
  out.c.resize(static_cast<Eigen::Index>(povm.size()), static_cast<Eigen::Index>(basis.size()));
  out.b.resize(static_cast<Eigen::Index>(povm.size()));
  for (std::size_t j = 0; j < povm.size(); ++j) {
    const auto comp = povm_decompose(povm.elements[j], basis);
    out.b(static_cast<Eigen::Index>(j)) = comp.b;
    if (comp.c.size() > 0) out.c.row(static_cast<Eigen::Index>(j)) = comp.c.transpose();
  }
  return out;
}

struct RankResult {
  std::size_t rank = 0;
  RVector singular_values;  ///< descending
};

/// Counts singular values above rel_tol * sigma_max.
inline RankResult numerical_rank(const RMatrix& c, double rel_tol = kDefaultRankTolerance) {
  require(rel_tol > 0.0, "numerical_rank: rel_tol must be positive");
  RankResult out;
  if (c.size() == 0) {
    out.singular_values.resize(0);
    return out;
  }
  Eigen::JacobiSVD<RMatrix> svd(c);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  if (smax <= 0.0) return out;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) > rel_tol * smax) ++out.rank;
  return out;
}

struct CompletenessReport {
  std::size_t rank = 0;
  std::size_t required = 0;
  RVector singular_values;
  bool complete = false;
  /// Orthonormal columns spanning the unmeasured Bloch directions.
  RMatrix kernel;

  std::size_t kernel_dim() const { return static_cast<std::size_t>(kernel.cols()); }
};

inline CompletenessReport completeness_from_coefficients(const RMatrix& c, double rel_tol) {
  CompletenessReport rep;
  rep.required = static_cast<std::size_t>(c.cols());
  if (c.cols() == 0) {
    rep.complete = true;
    rep.kernel.resize(0, 0);
    rep.singular_values.resize(0);
    return rep;
  }
  require(rel_tol > 0.0, "is_informationally_complete: rel_tol must be positive");
  Eigen::JacobiSVD<RMatrix> svd(c, Eigen::ComputeFullV);
  rep.singular_values = svd.singularValues();
  const double smax = rep.singular_values.size() > 0 ? rep.singular_values(0) : 0.0;
  if (smax > 0.0) {
    for (Eigen::Index i = 0; i < rep.singular_values.size(); ++i)
      if (rep.singular_values(i) > rel_tol * smax) ++rep.rank;
  }
  rep.complete = rep.rank >= rep.required;
  const auto r = static_cast<Eigen::Index>(rep.rank);
  rep.kernel = svd.matrixV().rightCols(c.cols() - r);
  return rep;
}

inline CompletenessReport is_informationally_complete(const PovmSet& povm,
                                                      double rel_tol = kDefaultRankTolerance) {
  const auto basis = gell_mann_basis(povm.dim());
  return completeness_from_coefficients(coefficient_matrix(povm, basis).c, rel_tol);
}

/// Real matrix of the flip-conjugation rho -> F conj(rho) F acting on Bloch
/// vectors, where F permutes ell -> -ell. It is an orthogonal involution.
inline RMatrix flip_conjugation_matrix(const Subspace& s, const OperatorBasis& basis) {
  require_same_dim(static_cast<Eigen::Index>(s.dim()), static_cast<Eigen::Index>(basis.dim()),
                   "flip_conjugation_matrix");
  const auto perm = s.flip_permutation();
  const auto n = static_cast<Eigen::Index>(s.dim());
  CMatrix f = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < perm.size(); ++i) f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i])) = 1.0;
  const auto m = static_cast<Eigen::Index>(basis.size());
  RMatrix out(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const CMatrix image = f * basis[static_cast<std::size_t>(j)].conjugate() * f;
    for (Eigen::Index i = 0; i < m; ++i)
      out(i, j) = linalg::trace_product(basis[static_cast<std::size_t>(i)], image).real();
  }
  return out;
}

inline constexpr double kKernelInclusionTolerance = 1e-6;

/// True iff every unmeasured direction lies in the -1 eigenspace of the
/// flip-conjugation, i.e. the only blind spots are the ones no intensity
/// measurement can resolve by the +-ell degeneracy.
inline bool kernel_degeneracy_oracle(const PovmSet& povm, double rel_tol = kDefaultRankTolerance,
                                     double inclusion_tol = kKernelInclusionTolerance) {
  require(povm.subspace.is_flip_symmetric(),
          "kernel_degeneracy_oracle: subspace not closed under ell -> -ell");
  const auto basis = gell_mann_basis(povm.dim());
  const auto report = completeness_from_coefficients(coefficient_matrix(povm, basis).c, rel_tol);
  if (report.kernel.cols() == 0) return true;
  const RMatrix flip = flip_conjugation_matrix(povm.subspace, basis);
  // (I + M)/2 projects onto the +1 eigenspace; a -1 direction has no component there.
  const RMatrix plus_part = 0.5 * (report.kernel + flip * report.kernel);
  return plus_part.cwiseAbs().maxCoeff() <= inclusion_tol;
}

enum class ScanFamily { nonnegative, symmetric };

struct ScanRow {
  int ell_cutoff = 0;
  std::size_t dim = 0;
  std::size_t rank = 0;
  std::size_t required = 0;
  bool complete = false;
};

inline Subspace scan_subspace(ScanFamily family, int ell_cutoff) {
  return build_subspace({0, 0, family == ScanFamily::nonnegative ? 0 : -ell_cutoff, ell_cutoff});
}

inline std::vector<ScanRow> completeness_scan(const PixelGrid& grid, ScanFamily family, int ell_cutoff_max,
                                              double rel_tol = kDefaultRankTolerance,
                                              ClosurePolicy closure = ClosurePolicy::automatic) {
  require(ell_cutoff_max >= 0, "completeness_scan: ell_cutoff_max must be nonnegative");
  std::vector<ScanRow> rows;
  for (int cutoff = 0; cutoff <= ell_cutoff_max; ++cutoff) {
    const auto povm = induced_povm(grid, scan_subspace(family, cutoff), closure);
    const auto rep = is_informationally_complete(povm, rel_tol);
    rows.push_back({cutoff, povm.dim(), rep.rank, rep.required, rep.complete});
  }
  return rows;
}

}  // namespace lgtomo
