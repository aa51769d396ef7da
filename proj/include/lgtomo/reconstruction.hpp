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

// Maximum-likelihood density-matrix estimation with the diluted R rho R
// iteration
//
//   rho <- N[(1 + eps R) rho (1 + eps R)],   R = sum_k (f_k / p_k) Pi_k,
//
// where f_k are relative frequencies and p_k = Tr(rho Pi_k). The step is
// halved whenever the likelihood would decrease, so accepted iterates are
// monotone.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lgtomo/completeness.hpp"
#include "lgtomo/induced_povm.hpp"
#include "lgtomo/linalg.hpp"
#include "lgtomo/operator_basis.hpp"

namespace lgtomo {

enum class MlStart { maximally_mixed, provided };

struct MlOptions {
  int max_iters = 5000;
  double dilution = 1.0;
  /// Threshold on the per-iteration gain of the mean log-likelihood per count.
  double stop_tol = 1e-11;
  MlStart start = MlStart::maximally_mixed;
  std::optional<DensityMatrix> start_state;
  /// Rank tolerance used for the uniqueness flag.
  double rel_tol = kDefaultRankTolerance;

  void validate() const {
    require(max_iters > 0, "MlOptions: max_iters must be positive");
    require(dilution > 0.0 && dilution <= 1.0, "MlOptions: dilution must lie in (0, 1]");
    require(stop_tol > 0.0, "MlOptions: stop_tol must be positive");
    require(start != MlStart::provided || start_state.has_value(), "MlOptions: provided start without a state");
  }
};

/// Snapshot passed to an observer after every accepted iteration.
struct MlIteration {
  int iteration = 0;
  double log_likelihood = 0.0;
  double dilution = 0.0;
  const CMatrix* rho = nullptr;
};

struct MlResult {
  DensityMatrix rho_hat;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  bool unique = true;
  std::size_t kernel_dim = 0;
  std::string gauge_note;
};

inline std::vector<double> outcome_probabilities(const CMatrix& rho, const PovmSet& povm) {
  std::vector<double> p(povm.size());
  for (std::size_t k = 0; k < povm.size(); ++k) p[k] = linalg::trace_product(rho, povm.elements[k]).real();
  return p;
}

/// First outcome with a positive count but zero model probability.
inline std::optional<std::size_t> impossible_outcome(const CMatrix& rho, const PovmSet& povm,
                                                     std::span<const double> counts) {
  require(counts.size() == povm.size(), "log_likelihood: counts length differs from POVM size");
  const auto p = outcome_probabilities(rho, povm);
  for (std::size_t k = 0; k < p.size(); ++k)
    if (counts[k] > 0.0 && p[k] <= 0.0) return k;
  return std::nullopt;
}

namespace detail {

inline double log_likelihood_raw(const CMatrix& rho, const PovmSet& povm, std::span<const double> counts) {
  double sum = 0.0;
  for (std::size_t k = 0; k < povm.size(); ++k) {
    if (counts[k] == 0.0) continue;
    const double p = linalg::trace_product(rho, povm.elements[k]).real();
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    sum += counts[k] * std::log(p);
  }
  return sum;
}

}  // namespace detail

/// sum_k n_k ln Tr(rho Pi_k); -infinity when an observed outcome has zero
/// probability (see impossible_outcome for the offending index).
inline double log_likelihood(const DensityMatrix& rho, const PovmSet& povm, std::span<const double> counts) {
  require(counts.size() == povm.size(), "log_likelihood: counts length differs from POVM size");
  require_same_dim(static_cast<Eigen::Index>(rho.dim()), static_cast<Eigen::Index>(povm.dim()), "log_likelihood");
  return detail::log_likelihood_raw(rho.matrix(), povm, counts);
}

/// R(rho) with zero-frequency outcomes skipped.
inline CMatrix likelihood_operator(const CMatrix& rho, const PovmSet& povm, std::span<const double> freqs) {
  const auto n = rho.rows();
  CMatrix r = CMatrix::Zero(n, n);
  for (std::size_t k = 0; k < povm.size(); ++k) {
    if (freqs[k] == 0.0) continue;
    const double p = linalg::trace_product(rho, povm.elements[k]).real();
    if (p <= 0.0) continue;
    r += (freqs[k] / p) * povm.elements[k];
  }
  return r;
}

inline MlResult ml_reconstruct(const PovmSet& povm, std::span<const double> counts, const MlOptions& opts = {},
                               const std::function<void(const MlIteration&)>& observer = {}) {
  opts.validate();
  require(counts.size() == povm.size(), "ml_reconstruct: counts length differs from POVM size");
  double total = 0.0;
  for (double c : counts) {
    require(c >= 0.0 && std::isfinite(c), "ml_reconstruct: counts must be finite and nonnegative");
    total += c;
  }
  require(total > 0.0, "ml_reconstruct: no counts");
  std::vector<double> freqs(counts.begin(), counts.end());
  for (double& f : freqs) f /= total;

  const auto d = static_cast<Eigen::Index>(povm.dim());
  const CMatrix identity = CMatrix::Identity(d, d);
  CMatrix rho = opts.start == MlStart::provided ? opts.start_state->matrix()
                                                : CMatrix(identity / static_cast<double>(d));
  require(rho.rows() == d, "ml_reconstruct: start state dimension mismatch");

  double ll = detail::log_likelihood_raw(rho, povm, freqs);
  double eps = opts.dilution;
  MlResult result;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const CMatrix r = likelihood_operator(rho, povm, freqs);
    // Halving the step restores monotonicity; a few halvings suffice in practice.
    bool accepted = false;
    CMatrix candidate;
    double candidate_ll = ll;
    for (int halving = 0; halving < 60; ++halving) {
      const CMatrix step = identity + eps * r;
      candidate = linalg::hermitian_part(step * rho * step);
      candidate /= candidate.trace().real();
      candidate_ll = detail::log_likelihood_raw(candidate, povm, freqs);
      if (candidate_ll >= ll) {
        accepted = true;
        break;
      }
      eps *= 0.5;
    }
    if (!accepted) break;
    const double gain = candidate_ll - ll;
    rho = std::move(candidate);
    ll = candidate_ll;
    if (observer) observer({it + 1, ll * total, eps, &rho});
    if (gain < opts.stop_tol) {
      result.converged = true;
      ++it;
      break;
    }
  }
  result.rho_hat = DensityMatrix(rho, 1e-9);
  result.log_likelihood = ll * total;
  result.iterations = it;

  const auto report = is_informationally_complete(povm, opts.rel_tol);
  result.unique = report.complete;
  result.kernel_dim = report.kernel_dim();
  if (!result.unique) {
    result.gauge_note = "POVM not informationally complete: rank " + std::to_string(report.rank) + " of " +
                        std::to_string(report.required) + "; kernel dimension " +
                        std::to_string(report.kernel_dim()) +
                        " (estimate is one representative of a family with equal likelihood)";
  }
  return result;
}

namespace detail {

/// PSD square root with eigenvalues below a relative round-off floor set to zero,
/// so that numerically pure states keep an exactly rank-deficient root.
inline CMatrix fidelity_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * es.eigenvalues().cwiseAbs().maxCoeff();
  RVector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > floor ? std::sqrt(ev(i)) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, evaluated as the squared trace norm
/// of sqrt(rho) sqrt(sigma).
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(static_cast<Eigen::Index>(rho.dim()), static_cast<Eigen::Index>(sigma.dim()), "fidelity");
  const CMatrix product = detail::fidelity_sqrt(rho.matrix()) * detail::fidelity_sqrt(sigma.matrix());
  Eigen::JacobiSVD<CMatrix> svd(product);
  const double f = svd.singularValues().sum();
  return std::clamp(f * f, 0.0, 1.0);
}

inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(static_cast<Eigen::Index>(rho.dim()), static_cast<Eigen::Index>(sigma.dim()), "trace_distance");
  return 0.5 * linalg::hermitian_eigenvalues(rho.matrix() - sigma.matrix()).cwiseAbs().sum();
}

struct MatrixTables {
  RMatrix re;
  RMatrix im;
};

inline MatrixTables render_matrix(const DensityMatrix& rho) { return {rho.matrix().real(), rho.matrix().imag()}; }

}  // namespace lgtomo
