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

// POVM induced in a truncated mode subspace by pixelized position
// detection: Pi_k = P_S |x_k,y_k><x_k,y_k| P_S, point-sampled at pixel
// centers and weighted by the pixel area.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lgtomo/linalg.hpp"
#include "lgtomo/modes.hpp"

namespace lgtomo {

/// nx x ny detector covering [-half_width, half_width]^2. Pixels are
/// indexed row-major with y outer and x inner.
class PixelGrid {
 public:
  PixelGrid() = default;
  PixelGrid(int nx, int ny, double half_width) : nx_(nx), ny_(ny), half_width_(half_width) {
    require(nx > 0 && ny > 0, "PixelGrid: pixel counts must be positive");
    require(half_width > 0.0 && std::isfinite(half_width), "PixelGrid: half_width must be positive");
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double half_width() const { return half_width_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  double dx() const { return 2.0 * half_width_ / nx_; }
  double dy() const { return 2.0 * half_width_ / ny_; }
  double pixel_area() const { return dx() * dy(); }

  std::pair<double, double> center(std::size_t k) const {
    if (k >= size()) throw std::out_of_range("PixelGrid: pixel index " + std::to_string(k) + " out of range");
    const auto ix = static_cast<int>(k % static_cast<std::size_t>(nx_));
    const auto iy = static_cast<int>(k / static_cast<std::size_t>(nx_));
    return {-half_width_ + (ix + 0.5) * dx(), -half_width_ + (iy + 0.5) * dy()};
  }

  std::vector<std::pair<double, double>> centers() const {
    std::vector<std::pair<double, double>> out;
    out.reserve(size());
    for (std::size_t k = 0; k < size(); ++k) out.push_back(center(k));
    return out;
  }

  friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

 private:
  int nx_ = 1;
  int ny_ = 1;
  double half_width_ = 1.0;
};

/// Projector onto the subspace-restricted position state at (x, y), scaled by `weight`.
inline CMatrix point_projector(const Subspace& s, double x, double y, double weight = 1.0) {
  const CVector w = s.amplitudes(x, y).conjugate();
  return weight * (w * w.adjoint());
}

inline CMatrix pixel_projector(const PixelGrid& grid, std::size_t k, const Subspace& s) {
  const auto [x, y] = grid.center(k);
  return point_projector(s, x, y, grid.pixel_area());
}

enum class ClosurePolicy {
  /// Append identity - sum when that remainder is PSD; fail otherwise.
  complement,
  /// Divide every element by the largest eigenvalue of the sum, then append the remainder.
  rescale,
  /// complement, falling back to rescale when the remainder is indefinite.
  automatic,
  /// Leave the pixel elements untouched.
  none,
};

/// Raised when the complement closure would need a negative operator.
class ClosureError : public std::runtime_error {
 public:
  ClosureError(const std::string& msg, double eigenvalue) : std::runtime_error(msg), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

struct PovmSet {
  /// Pixel elements first (grid order), then the closure element if any.
  std::vector<CMatrix> elements;
  Subspace subspace;
  /// Spectral distance of the raw pixel sum from the identity.
  double completeness_defect = 0.0;
  std::size_t pixel_count = 0;
  bool has_closure = false;
  /// Factor the pixel elements were divided by (1 unless rescaled).
  double rescale_factor = 1.0;

  std::size_t size() const { return elements.size(); }
  std::size_t dim() const { return subspace.dim(); }

  CMatrix sum() const {
    const auto n = static_cast<Eigen::Index>(dim());
    CMatrix total = CMatrix::Zero(n, n);
    for (const auto& e : elements) total += e;
    return total;
  }
};

inline constexpr double kClosureTolerance = 1e-8;

inline PovmSet induced_povm(const PixelGrid& grid, const Subspace& s,
                            ClosurePolicy closure = ClosurePolicy::automatic) {
  require(grid.size() > 0 && s.dim() > 0, "induced_povm: empty grid or subspace");
  const auto n = static_cast<Eigen::Index>(s.dim());
  PovmSet povm;
  povm.subspace = s;
  povm.pixel_count = grid.size();
  povm.elements.reserve(grid.size() + 1);
  for (std::size_t k = 0; k < grid.size(); ++k) povm.elements.push_back(pixel_projector(grid, k, s));

  const CMatrix identity = CMatrix::Identity(n, n);
  CMatrix total = povm.sum();
  povm.completeness_defect = linalg::spectral_norm_hermitian(total - identity);
  if (closure == ClosurePolicy::none) return povm;

  CMatrix remainder = linalg::hermitian_part(identity - total);
  double lowest = linalg::min_eigenvalue(remainder);
  if (lowest < -kClosureTolerance) {
    if (closure == ClosurePolicy::complement) {
      throw ClosureError("induced_povm: pixel sum exceeds identity; remainder eigenvalue " +
                             std::to_string(lowest),
                         lowest);
    }
    const double scale = linalg::max_eigenvalue(total);
    for (auto& e : povm.elements) e /= scale;
    povm.rescale_factor = scale;
    total /= scale;
    remainder = linalg::hermitian_part(identity - total);
  } else if (closure == ClosurePolicy::rescale) {
    const double scale = linalg::max_eigenvalue(total);
    if (scale > 1.0) {
      for (auto& e : povm.elements) e /= scale;
      povm.rescale_factor = scale;
      remainder = linalg::hermitian_part(identity - total / scale);
    }
  }
  povm.elements.push_back(linalg::clip_to_psd(remainder));
  povm.has_closure = true;
  return povm;
}

/// POVM of a detector preceded by the unitary ell -> ell + delta, written in
/// the labels of the unshifted subspace `s`.
inline PovmSet induced_povm_shifted(const PixelGrid& grid, const Subspace& s, int delta,
                                    ClosurePolicy closure = ClosurePolicy::automatic) {
  PovmSet povm = induced_povm(grid, ell_shift(s, delta), closure);
  povm.subspace = s;
  return povm;
}

enum class NormKind { frobenius, spectral };

inline double commutator_norm(const CMatrix& a, const CMatrix& b, NormKind kind = NormKind::frobenius) {
  require(a.rows() == a.cols() && b.rows() == b.cols(), "commutator_norm: matrices must be square");
  require_same_dim(a.rows(), b.rows(), "commutator_norm");
  const CMatrix c = a * b - b * a;
  return kind == NormKind::frobenius ? c.norm() : linalg::spectral_norm(c);
}

struct IntRange {
  int lo = 0;
  int hi = 0;
};

/// Commutator norm between the projected point detections at `a` and `b`
/// for every truncation p = 0..p_cutoff, ell = -ell_cutoff..ell_cutoff.
/// Rows follow p_cutoffs, columns follow ell_cutoffs.
inline RMatrix incompatibility_map(std::pair<double, double> a, std::pair<double, double> b,
                                   IntRange p_cutoffs, IntRange ell_cutoffs,
                                   NormKind kind = NormKind::frobenius, double pixel_area = 1.0) {
  require(p_cutoffs.lo >= 0 && p_cutoffs.lo <= p_cutoffs.hi, "incompatibility_map: bad p_cutoff range");
  require(ell_cutoffs.lo >= 0 && ell_cutoffs.lo <= ell_cutoffs.hi, "incompatibility_map: bad ell_cutoff range");
  RMatrix out(p_cutoffs.hi - p_cutoffs.lo + 1, ell_cutoffs.hi - ell_cutoffs.lo + 1);
  for (int pc = p_cutoffs.lo; pc <= p_cutoffs.hi; ++pc) {
    for (int lc = ell_cutoffs.lo; lc <= ell_cutoffs.hi; ++lc) {
      const Subspace s = build_subspace({0, pc, -lc, lc});
      out(pc - p_cutoffs.lo, lc - ell_cutoffs.lo) =
          commutator_norm(point_projector(s, a.first, a.second, pixel_area),
                          point_projector(s, b.first, b.second, pixel_area), kind);
    }
  }
  return out;
}

}  // namespace lgtomo
