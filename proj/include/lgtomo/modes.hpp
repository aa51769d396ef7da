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

// Laguerre-Gauss transverse modes in dimensionless waist units and the
// truncated mode sets that span a reconstruction subspace.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lgtomo/linalg.hpp"

namespace lgtomo {

/// Mode label (ell, p): topological charge and radial index.
struct ModeIndex {
  int ell = 0;
  int p = 0;

  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
  /// Lexicographic in (p, ell).
  friend std::strong_ordering operator<=>(const ModeIndex& a, const ModeIndex& b) {
    if (auto c = a.p <=> b.p; c != 0) return c;
    return a.ell <=> b.ell;
  }
};

inline std::string to_string(const ModeIndex& m) {
  return "(ell=" + std::to_string(m.ell) + ",p=" + std::to_string(m.p) + ")";
}

/// Rectangular truncation p_min..p_max, ell_min..ell_max (inclusive).
struct TruncationSpec {
  int p_min = 0;
  int p_max = 0;
  int ell_min = 0;
  int ell_max = 0;

  void validate() const {
    require(p_min >= 0, "TruncationSpec: p_min must be nonnegative");
    require(p_min <= p_max, "TruncationSpec: empty p range");
    require(ell_min <= ell_max, "TruncationSpec: empty ell range");
  }
};

/// Generalized Laguerre polynomial L_n^alpha(x) by the three-term recurrence.
inline double laguerre(int n, double alpha, double x) {
  if (n < 0) return 0.0;
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Unit-L2 normalization sqrt(2^{|l|+1} p! / (pi (p+|l|)!)).
inline double lg_normalization(const ModeIndex& m) {
  const int a = std::abs(m.ell);
  const double log_n2 = (a + 1) * std::numbers::ln2 + std::lgamma(m.p + 1.0) -
                        std::log(std::numbers::pi) - std::lgamma(m.p + a + 1.0);
  return std::exp(0.5 * log_n2);
}

/// Normalized LG amplitude at (x, y).
inline Complex lg_amplitude(const ModeIndex& m, double x, double y) {
  const int a = std::abs(m.ell);
  const double r2 = x * x + y * y;
  const double radial = lg_normalization(m) * std::pow(std::sqrt(r2), a) *
                        laguerre(m.p, a, 2.0 * r2) * std::exp(-r2);
  if (m.ell == 0) return {radial, 0.0};
  const double phase = m.ell * std::atan2(y, x);
  return {radial * std::cos(phase), radial * std::sin(phase)};
}

/// Ordered set of distinct modes spanning the reconstruction space.
class Subspace {
 public:
  Subspace() = default;

  /// Sorts into (p, ell) order; rejects duplicates, empty sets and negative p.
  explicit Subspace(std::vector<ModeIndex> modes) : modes_(std::move(modes)) {
    require(!modes_.empty(), "Subspace: at least one mode required");
    std::sort(modes_.begin(), modes_.end());
    require(std::adjacent_find(modes_.begin(), modes_.end()) == modes_.end(),
            "Subspace: duplicate mode");
    require(modes_.front().p >= 0, "Subspace: negative radial index");
  }

  const std::vector<ModeIndex>& modes() const { return modes_; }
  std::size_t dim() const { return modes_.size(); }
  const ModeIndex& operator[](std::size_t i) const { return modes_[i]; }

  std::optional<std::size_t> index_of(const ModeIndex& m) const {
    auto it = std::lower_bound(modes_.begin(), modes_.end(), m);
    if (it == modes_.end() || *it != m) return std::nullopt;
    return static_cast<std::size_t>(it - modes_.begin());
  }

  bool contains(const ModeIndex& m) const { return index_of(m).has_value(); }

  /// True when (ell, p) in the set implies (-ell, p) in the set.
  bool is_flip_symmetric() const {
    return std::all_of(modes_.begin(), modes_.end(),
                       [this](const ModeIndex& m) { return contains({-m.ell, m.p}); });
  }

  /// Index permutation realizing ell -> -ell. Requires a flip-symmetric set.
  std::vector<std::size_t> flip_permutation() const {
    require(is_flip_symmetric(), "Subspace: not closed under ell -> -ell");
    std::vector<std::size_t> perm(dim());
    for (std::size_t i = 0; i < dim(); ++i) perm[i] = *index_of({-modes_[i].ell, modes_[i].p});
    return perm;
  }

  /// Amplitudes of every mode at one point, in subspace order.
  CVector amplitudes(double x, double y) const {
    CVector v(static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < dim(); ++i) v(static_cast<Eigen::Index>(i)) = lg_amplitude(modes_[i], x, y);
    return v;
  }

  friend bool operator==(const Subspace&, const Subspace&) = default;

 private:
  std::vector<ModeIndex> modes_;
};

inline Subspace build_subspace(const TruncationSpec& spec) {
  spec.validate();
  std::vector<ModeIndex> modes;
  for (int p = spec.p_min; p <= spec.p_max; ++p)
    for (int ell = spec.ell_min; ell <= spec.ell_max; ++ell) modes.push_back({ell, p});
  return Subspace(std::move(modes));
}

/// Applies the angular-momentum raising (or lowering) pre-transformation ell -> ell + delta.
inline Subspace ell_shift(const Subspace& s, int delta) {
  std::vector<ModeIndex> modes = s.modes();
  for (auto& m : modes) m.ell += delta;
  return Subspace(std::move(modes));
}

/// Tensor-product midpoint rule on [-half_width, half_width]^2.
struct QuadratureSpec {
  double half_width = 5.0;
  int points = 400;
  /// Largest admissible probability mass outside the window for any mode.
  double tail_tolerance = 1e-10;
};

/// Probability mass of |LG|^2 outside the disk of radius `radius`; bounds
/// the mass outside the enclosing square window.
inline double lg_tail_mass(const ModeIndex& m, double radius) {
  // In u = 2 r^2 the radial density is u^a L_p^a(u)^2 e^{-u} p!/(p+a)!.
  const int a = std::abs(m.ell);
  const double log_c = std::lgamma(m.p + 1.0) - std::lgamma(m.p + a + 1.0);
  auto density = [&](double u) {
    const double l = laguerre(m.p, a, u);
    if (u <= 0.0) return (a == 0 ? 1.0 : 0.0) * l * l * std::exp(log_c);
    return std::exp(log_c + a * std::log(u) - u) * l * l;
  };
  const double u0 = 2.0 * radius * radius;
  const double span = 80.0 + 4.0 * (a + 2 * m.p);
  const int n = 8000;  // even
  const double h = span / n;
  double sum = density(u0) + density(u0 + span);
  for (int i = 1; i < n; ++i) sum += density(u0 + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

namespace detail {

inline void check_window(const std::vector<ModeIndex>& modes, const QuadratureSpec& quad) {
  require(quad.half_width > 0.0 && quad.points > 0, "QuadratureSpec: empty window");
  for (const auto& m : modes) {
    const double tail = lg_tail_mass(m, quad.half_width);
    if (tail > quad.tail_tolerance) {
      throw PreconditionError("quadrature window too small for mode " + to_string(m) +
                              ": tail mass " + std::to_string(tail));
    }
  }
}

}  // namespace detail

/// Gram matrix G_ij = integral conj(LG_i) LG_j over the quadrature window.
inline CMatrix gram_matrix(const Subspace& s, const QuadratureSpec& quad = {}) {
  detail::check_window(s.modes(), quad);
  const auto d = static_cast<Eigen::Index>(s.dim());
  const double h = 2.0 * quad.half_width / quad.points;
  CMatrix gram = CMatrix::Zero(d, d);
  // One row of samples at a time keeps memory bounded for fine grids.
  CMatrix samples(d, quad.points);
  for (int iy = 0; iy < quad.points; ++iy) {
    const double y = -quad.half_width + (iy + 0.5) * h;
    for (int ix = 0; ix < quad.points; ++ix) {
      const double x = -quad.half_width + (ix + 0.5) * h;
      samples.col(ix) = s.amplitudes(x, y);
    }
    gram.noalias() += samples.conjugate() * samples.transpose();
  }
  return gram * (h * h);
}

inline Complex mode_overlap(const ModeIndex& a, const ModeIndex& b, const QuadratureSpec& quad = {}) {
  detail::check_window({a, b}, quad);
  const double h = 2.0 * quad.half_width / quad.points;
  Complex sum = 0.0;
  for (int iy = 0; iy < quad.points; ++iy) {
    const double y = -quad.half_width + (iy + 0.5) * h;
    for (int ix = 0; ix < quad.points; ++ix) {
      const double x = -quad.half_width + (ix + 0.5) * h;
      sum += std::conj(lg_amplitude(a, x, y)) * lg_amplitude(b, x, y);
    }
  }
  return sum * (h * h);
}

}  // namespace lgtomo
