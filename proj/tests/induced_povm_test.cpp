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

#include "lgtomo/induced_povm.hpp"

#include <future>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace lgtomo;

namespace {

const PixelGrid kGrid11(11, 11, 3.5);

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(pixel_grid, geometry) {
  EXPECT_EQ(kGrid11.size(), 121u);
  EXPECT_NEAR(kGrid11.pixel_area(), (7.0 / 11) * (7.0 / 11), 1e-15);
  const auto [x0, y0] = kGrid11.center(0);
  EXPECT_NEAR(x0, -3.5 + 3.5 / 11, 1e-15);
  EXPECT_NEAR(y0, -3.5 + 3.5 / 11, 1e-15);
  const auto [xc, yc] = kGrid11.center(60);
  EXPECT_NEAR(xc, 0.0, 1e-15);
  EXPECT_NEAR(yc, 0.0, 1e-15);
  // x runs fastest.
  EXPECT_GT(kGrid11.center(1).first, x0);
  EXPECT_EQ(kGrid11.center(1).second, y0);
  for (const auto& [x, y] : kGrid11.centers()) {
    EXPECT_LT(std::abs(x), 3.5);
    EXPECT_LT(std::abs(y), 3.5);
  }
  EXPECT_THROW(kGrid11.center(121), std::out_of_range);
  EXPECT_THROW(PixelGrid(0, 3, 1.0), PreconditionError);
  EXPECT_THROW(PixelGrid(3, 3, -1.0), PreconditionError);
}

TEST(pixel_projector, origin_sees_only_zero_charge) {
  const Subspace s = build_subspace({0, 0, 0, 2});
  const CMatrix pi = pixel_projector(kGrid11, 60, s);
  const auto zero = static_cast<Eigen::Index>(*s.index_of({0, 0}));
  for (Eigen::Index i = 0; i < pi.rows(); ++i)
    for (Eigen::Index j = 0; j < pi.cols(); ++j) {
      if (i == zero && j == zero) {
        EXPECT_GT(pi(i, j).real(), 0.0);
      } else {
        EXPECT_EQ(std::abs(pi(i, j)), 0.0);
      }
    }
}

TEST(pixel_projector, rank_one_with_expected_trace) {
  const Subspace s = build_subspace({0, 1, -2, 2});
  for (std::size_t k = 0; k < kGrid11.size(); k += 7) {
    const CMatrix pi = pixel_projector(kGrid11, k, s);
    const auto [x, y] = kGrid11.center(k);
    double expected = 0.0;
    for (const auto& m : s.modes()) expected += std::norm(lg_amplitude(m, x, y));
    EXPECT_NEAR(pi.trace().real(), kGrid11.pixel_area() * expected, 1e-14);
    EXPECT_LE(linalg::hermiticity_defect(pi), 1e-15);
    Eigen::JacobiSVD<CMatrix> svd(pi);
    const RVector sv = svd.singularValues();
    if (sv(0) > 0.0) {
      EXPECT_LE(sv(1), 1e-14 * sv(0));
    }
    EXPECT_GE(linalg::min_eigenvalue(pi), -1e-15);
  }
}

TEST(pixel_projector, real_axis_cross_term) {
  const Subspace s = build_subspace({0, 0, -1, 1});
  const PixelGrid grid(4, 1, 2.0);  // centers at y = 0, x = +-0.5, +-1.5
  const std::size_t k = 2;
  const auto [x, y] = grid.center(k);
  ASSERT_GT(x, 0.0);
  ASSERT_EQ(y, 0.0);
  const CMatrix pi = pixel_projector(grid, k, s);
  const auto m1 = static_cast<Eigen::Index>(*s.index_of({-1, 0}));
  const auto p1 = static_cast<Eigen::Index>(*s.index_of({1, 0}));
  const double phi1 = std::abs(lg_amplitude({1, 0}, x, y));
  EXPECT_NEAR(std::abs(pi(m1, p1) - std::conj(pi(p1, m1))), 0.0, 1e-15);
  EXPECT_NEAR(pi(m1, p1).real(), grid.pixel_area() * phi1 * phi1, 1e-14);
  EXPECT_NEAR(pi(m1, p1).imag(), 0.0, 1e-15);
}

TEST(pixel_projector, index_out_of_range) {
  EXPECT_THROW(pixel_projector(kGrid11, 121, build_subspace({0, 0, 0, 1})), std::out_of_range);
}

TEST(induced_povm, fig5_grid_has_closure_element) {
  const auto povm = induced_povm(kGrid11, build_subspace({0, 0, 0, 4}));
  EXPECT_EQ(povm.pixel_count, 121u);
  EXPECT_TRUE(povm.has_closure);
  EXPECT_EQ(povm.size(), 122u);
  EXPECT_LE(max_abs(povm.sum() - CMatrix::Identity(5, 5)), 1e-8);
  for (const auto& e : povm.elements) {
    EXPECT_LE(linalg::hermiticity_defect(e), 1e-12);
    EXPECT_GE(linalg::min_eigenvalue(e), -1e-10);
  }
  const auto raw = induced_povm(kGrid11, build_subspace({0, 0, 0, 4}), ClosurePolicy::none);
  EXPECT_EQ(raw.size(), 121u);
  EXPECT_FALSE(raw.has_closure);
}

TEST(induced_povm, one_dimensional_subspace) {
  const auto povm = induced_povm(kGrid11, build_subspace({0, 0, 0, 0}));
  double total = 0.0;
  for (const auto& e : povm.elements) {
    ASSERT_EQ(e.size(), 1);
    EXPECT_GE(e(0, 0).real(), 0.0);
    EXPECT_EQ(e(0, 0).imag(), 0.0);
    total += e(0, 0).real();
  }
  EXPECT_NEAR(total, 1.0, 1e-8);
}

TEST(induced_povm, complement_fails_when_pixels_overshoot) {
  // Coarse pixels overestimate the Gaussian integral: sum = 1.027 for this grid.
  const PixelGrid coarse(3, 3, 1.5);
  const Subspace s = build_subspace({0, 0, 0, 0});
  try {
    induced_povm(coarse, s, ClosurePolicy::complement);
    FAIL() << "expected ClosureError";
  } catch (const ClosureError& e) {
    EXPECT_LT(e.eigenvalue(), -1e-8);
  }
  const auto povm = induced_povm(coarse, s, ClosurePolicy::automatic);
  EXPECT_GT(povm.rescale_factor, 1.0);
  EXPECT_NEAR(povm.sum()(0, 0).real(), 1.0, 1e-12);
  const auto rescaled = induced_povm(kGrid11, build_subspace({0, 0, 0, 2}), ClosurePolicy::rescale);
  EXPECT_LE(max_abs(rescaled.sum() - CMatrix::Identity(3, 3)), 1e-8);
}

TEST(induced_povm, pixel_sum_is_midpoint_gram_quadrature) {
  const Subspace s = build_subspace({0, 1, -1, 2});
  const auto n = static_cast<Eigen::Index>(s.dim());
  double defect = 0.0;
  for (auto [hw, points] : {std::pair{3.0, 11}, std::pair{4.0, 21}, std::pair{5.0, 41}, std::pair{6.0, 81}}) {
    const PixelGrid grid(points, points, hw);
    const auto povm = induced_povm(grid, s, ClosurePolicy::none);
    const CMatrix gram = gram_matrix(s, {hw, points, 1.0});
    EXPECT_LE(max_abs(povm.sum() - gram), 1e-12);
    EXPECT_NEAR(povm.completeness_defect, linalg::spectral_norm_hermitian(gram - CMatrix::Identity(n, n)), 1e-12);
    defect = povm.completeness_defect;
  }
  EXPECT_LT(defect, 1e-10);
}

TEST(induced_povm, defect_decreases_with_resolution) {
  for (const auto& spec : {TruncationSpec{0, 0, 0, 4}, TruncationSpec{0, 0, -2, 2}, TruncationSpec{0, 1, -1, 1}}) {
    // Beyond 16 pixels per axis the window truncation (~1e-10 at half_width 4) dominates.
    double previous = 1e9;
    for (int n : {4, 8, 16}) {
      const auto povm = induced_povm(PixelGrid(n, n, 4.0), build_subspace(spec), ClosurePolicy::none);
      EXPECT_LT(povm.completeness_defect, previous) << "n=" << n;
      previous = povm.completeness_defect;
    }
  }
}

TEST(induced_povm, concurrent_construction_is_deterministic) {
  const Subspace s = build_subspace({0, 0, -3, 3});
  const auto reference = induced_povm(kGrid11, s);
  std::vector<std::future<PovmSet>> jobs;
  for (int i = 0; i < 4; ++i) jobs.push_back(std::async(std::launch::async, [&] { return induced_povm(kGrid11, s); }));
  for (auto& j : jobs) {
    const auto povm = j.get();
    ASSERT_EQ(povm.size(), reference.size());
    for (std::size_t k = 0; k < povm.size(); ++k) EXPECT_EQ(povm.elements[k], reference.elements[k]);
  }
}

TEST(commutator_norm, examples) {
  std::mt19937_64 rng(1);
  const CMatrix a = test::random_hermitian(rng, 4);
  const CMatrix b = test::random_hermitian(rng, 4);
  EXPECT_EQ(commutator_norm(a, a), 0.0);
  EXPECT_NEAR(commutator_norm(a, b), commutator_norm(b, a), 1e-14);
  EXPECT_NEAR(commutator_norm(a, b, NormKind::spectral), commutator_norm(b, a, NormKind::spectral), 1e-12);
  EXPECT_LE(commutator_norm(a, b, NormKind::spectral), commutator_norm(a, b) + 1e-12);
  EXPECT_THROW(commutator_norm(a, CMatrix::Identity(3, 3)), PreconditionError);
  const Subspace one = build_subspace({0, 0, 0, 0});
  EXPECT_EQ(commutator_norm(pixel_projector(kGrid11, 3, one), pixel_projector(kGrid11, 70, one)), 0.0);
}

TEST(commutator_norm, distinct_pixels_do_not_commute_after_projection) {
  const auto povm = induced_povm(kGrid11, build_subspace({0, 0, -1, 1}), ClosurePolicy::none);
  EXPECT_GT(commutator_norm(povm.elements[60], povm.elements[61]), 1e-6);
}

TEST(incompatibility_map, fig1_structure) {
  const RMatrix map = incompatibility_map({0.0, 0.0}, {0.0, 1.0}, {0, 3}, {0, 5});
  EXPECT_EQ(map(0, 0), 0.0);
  for (Eigen::Index p = 0; p < map.rows(); ++p) {
    for (Eigen::Index l = 1; l < map.cols(); ++l) {
      if (p == 1) {
        // L_0(2) + L_1(2) = 0: the two projected point states are orthogonal, hence commute.
        EXPECT_LE(map(p, l), 1e-14);
      } else {
        EXPECT_GT(map(p, l), 1e-8);
      }
    }
  }
  // Radial modes alone already make the detections incompatible, except at p_cutoff = 1.
  EXPECT_GT(map(2, 0), 1e-8);
  EXPECT_GT(map(3, 0), 1e-8);
  const RMatrix swapped = incompatibility_map({0.0, 1.0}, {0.0, 0.0}, {0, 3}, {0, 5});
  EXPECT_LE((map - swapped).cwiseAbs().maxCoeff(), 1e-14);
  const RMatrix spectral = incompatibility_map({0.0, 0.0}, {0.0, 1.0}, {0, 3}, {0, 5}, NormKind::spectral);
  EXPECT_LE((spectral - map).maxCoeff(), 1e-12);
}

TEST(incompatibility_map, identical_pixels_are_compatible) {
  const RMatrix map = incompatibility_map({0.3, -0.7}, {0.3, -0.7}, {0, 2}, {0, 4});
  EXPECT_EQ(map.cwiseAbs().maxCoeff(), 0.0);
}
