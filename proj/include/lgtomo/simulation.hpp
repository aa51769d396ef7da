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

// Vortex-state preparation and synthetic intensity scans through an
// induced POVM, with seeded Poisson shot noise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lgtomo/induced_povm.hpp"
#include "lgtomo/linalg.hpp"
#include "lgtomo/modes.hpp"
#include "lgtomo/operator_basis.hpp"

namespace lgtomo {

/// Superposition sum_m c_m |m>, normalized on construction.
class StateSpec {
 public:
  using Term = std::pair<ModeIndex, Complex>;

  StateSpec() = default;
  explicit StateSpec(std::vector<Term> terms) : terms_(std::move(terms)) {
    double norm2 = 0.0;
    for (const auto& [m, c] : terms_) norm2 += std::norm(c);
    require(norm2 > 0.0, "StateSpec: at least one nonzero coefficient required");
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& [m, c] : terms_) c *= scale;
  }

  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

inline DensityMatrix make_state(const StateSpec& spec, const Subspace& s) {
  require(!spec.terms().empty(), "make_state: empty state");
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(s.dim()));
  for (const auto& [m, c] : spec.terms()) {
    const auto idx = s.index_of(m);
    require(idx.has_value(), "make_state: mode " + to_string(m) + " outside the subspace");
    psi(static_cast<Eigen::Index>(*idx)) += c;
  }
  return DensityMatrix::pure(psi);
}

/// rho -> F conj(rho) F with F the ell -> -ell permutation.
inline DensityMatrix flip_conjugate(const DensityMatrix& rho, const Subspace& s) {
  require_same_dim(static_cast<Eigen::Index>(rho.dim()), static_cast<Eigen::Index>(s.dim()), "flip_conjugate");
  const auto perm = s.flip_permutation();
  const auto n = static_cast<Eigen::Index>(s.dim());
  CMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = std::conj(rho.matrix()(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]),
                                         static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)])));
  return DensityMatrix(std::move(out));
}

enum class ImageKind { probability, counts };

inline const char* to_string(ImageKind k) { return k == ImageKind::probability ? "probability" : "counts"; }

struct IntensityImage {
  PixelGrid grid;
  /// Per-pixel values in grid order.
  std::vector<double> values;
  ImageKind kind = ImageKind::probability;
  std::optional<std::uint64_t> total_photons;
  std::optional<std::uint64_t> seed;
  /// Value of the closure outcome (light outside the detector), when modeled.
  std::optional<double> remainder;

  double pixel_sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }

  /// Pixel values followed by the remainder when present; the layout of a PovmSet with closure.
  std::vector<double> outcome_values() const {
    std::vector<double> out = values;
    if (remainder) out.push_back(*remainder);
    return out;
  }
};

inline constexpr double kNegativeProbabilityTolerance = 1e-10;

inline IntensityImage ideal_intensity(const DensityMatrix& rho, const PovmSet& povm, const PixelGrid& grid) {
  require_same_dim(static_cast<Eigen::Index>(rho.dim()), static_cast<Eigen::Index>(povm.dim()), "ideal_intensity");
  require(povm.pixel_count == grid.size(), "ideal_intensity: POVM does not match the grid");
  IntensityImage img;
  img.grid = grid;
  img.kind = ImageKind::probability;
  img.values.reserve(povm.pixel_count);
  for (std::size_t k = 0; k < povm.size(); ++k) {
    const double p = linalg::trace_product(rho.matrix(), povm.elements[k]).real();
    if (p < -kNegativeProbabilityTolerance) {
      throw std::runtime_error("ideal_intensity: negative probability " + std::to_string(p) + " at outcome " +
                               std::to_string(k) + " (broken POVM)");
    }
    if (k < povm.pixel_count)
      img.values.push_back(std::max(p, 0.0));
    else
      img.remainder = std::max(p, 0.0);
  }
  return img;
}

struct NoiseOptions {
  /// Standard deviation of additive Gaussian read noise in counts; 0 disables it.
  double read_noise_sigma = 0.0;
  /// Drop the closure outcome, emulating a detector that reports pixels only.
  bool mask_remainder = false;
};

namespace detail {

/// Independent generator per outcome so any evaluation order reproduces the same counts.
inline std::mt19937_64 outcome_engine(std::uint64_t seed, std::uint64_t outcome) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(outcome), static_cast<std::uint32_t>(outcome >> 32)};
  return std::mt19937_64(seq);
}

inline double sample_count(double mean, std::uint64_t seed, std::uint64_t outcome, double read_sigma) {
  auto engine = outcome_engine(seed, outcome);
  double n = 0.0;
  if (mean > 0.0) n = static_cast<double>(std::poisson_distribution<long long>(mean)(engine));
  if (read_sigma > 0.0) n = std::max(0.0, std::round(n + std::normal_distribution<double>(0.0, read_sigma)(engine)));
  return n;
}

}  // namespace detail

inline IntensityImage add_noise(const IntensityImage& image, std::uint64_t total_photons, std::uint64_t seed,
                                const NoiseOptions& opts = {}) {
  require(image.kind == ImageKind::probability, "add_noise: input must be a probability image");
  IntensityImage out;
  out.grid = image.grid;
  out.kind = ImageKind::counts;
  out.total_photons = total_photons;
  out.seed = seed;
  const double n = static_cast<double>(total_photons);
  out.values.resize(image.values.size());
  for (std::size_t k = 0; k < image.values.size(); ++k)
    out.values[k] = detail::sample_count(n * image.values[k], seed, k, opts.read_noise_sigma);
  if (image.remainder && !opts.mask_remainder)
    out.remainder = detail::sample_count(n * *image.remainder, seed, image.values.size(), opts.read_noise_sigma);
  return out;
}

}  // namespace lgtomo
