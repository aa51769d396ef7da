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

#include "lgtomo/modes.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace lgtomo;

TEST(laguerre, recurrence_matches_series) {
  for (int n = 0; n <= 5; ++n)
    for (int a = 0; a <= 6; ++a)
      for (double x : {0.0, 0.3, 1.0, 2.5, 7.0, 15.0})
        EXPECT_NEAR(laguerre(n, a, x), test::laguerre_series(n, a, x), 1e-9 * (1.0 + std::abs(test::laguerre_series(n, a, x))))
            << "n=" << n << " a=" << a << " x=" << x;
}

TEST(lg_amplitude, vanishes_at_origin_for_nonzero_charge) {
  EXPECT_EQ(lg_amplitude({1, 0}, 0.0, 0.0), Complex(0.0, 0.0));
  EXPECT_EQ(lg_amplitude({-3, 2}, 0.0, 0.0), Complex(0.0, 0.0));
}

TEST(lg_amplitude, negative_charge_is_conjugate) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng), y = u(rng);
    for (ModeIndex m : {ModeIndex{2, 1}, ModeIndex{1, 0}, ModeIndex{4, 3}}) {
      const Complex plus = lg_amplitude(m, x, y);
      const Complex minus = lg_amplitude({-m.ell, m.p}, x, y);
      EXPECT_NEAR(std::abs(minus - std::conj(plus)), 0.0, 1e-15);
      EXPECT_NEAR(std::norm(minus), std::norm(plus), 1e-15);
    }
  }
}

TEST(lg_amplitude, gaussian_peak_matches_quadrature_normalization) {
  // Normalize the bare Gaussian by quadrature instead of the closed form.
  const double power = test::raw_profile_power({0, 0});
  EXPECT_NEAR(lg_amplitude({0, 0}, 0.0, 0.0).real(), 1.0 / std::sqrt(power), 1e-10);
}

TEST(lg_amplitude, closed_form_normalization_matches_quadrature) {
  for (int p = 0; p <= 4; ++p)
    for (int ell = -5; ell <= 5; ++ell) {
      const ModeIndex m{ell, p};
      const double n2 = lg_normalization(m) * lg_normalization(m);
      EXPECT_NEAR(n2 * test::raw_profile_power(m), 1.0, 1e-9) << to_string(m);
    }
}

TEST(mode_overlap, examples) {
  EXPECT_NEAR(std::abs(mode_overlap({0, 0}, {0, 0}) - 1.0), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(mode_overlap({1, 0}, {2, 0})), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(mode_overlap({0, 0}, {0, 1})), 0.0, 1e-9);
}

TEST(mode_overlap, small_window_is_flagged) {
  EXPECT_THROW(mode_overlap({0, 0}, {0, 0}, {2.0, 100}), PreconditionError);
  EXPECT_THROW(mode_overlap({6, 2}, {6, 2}, {4.0, 100}), PreconditionError);
  EXPECT_NO_THROW(mode_overlap({0, 0}, {0, 0}, {5.0, 50}));
}

TEST(mode_overlap, tail_mass_bound) {
  EXPECT_NEAR(lg_tail_mass({0, 0}, 1.0), std::exp(-2.0), 1e-10);
  EXPECT_LT(lg_tail_mass({4, 0}, 5.0), 1e-10);
  EXPECT_GT(lg_tail_mass({4, 0}, 2.0), 1e-3);
}

TEST(gram_matrix, mixed_radial_set_is_orthonormal) {
  const Subspace s = build_subspace({0, 1, -2, 2});
  const CMatrix g = gram_matrix(s);
  const auto n = static_cast<Eigen::Index>(s.dim());
  EXPECT_LE((g - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(build_subspace, dimensions) {
  EXPECT_EQ(build_subspace({0, 0, 0, 4}).dim(), 5u);
  EXPECT_EQ(build_subspace({0, 0, -2, 2}).dim(), 5u);
  EXPECT_EQ(build_subspace({0, 1, -1, 1}).dim(), 6u);
}

TEST(build_subspace, ordering_is_p_then_ell) {
  const Subspace s = build_subspace({0, 1, -1, 1});
  const std::vector<ModeIndex> expected{{-1, 0}, {0, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  EXPECT_EQ(s.modes(), expected);
  EXPECT_EQ(build_subspace({0, 1, -1, 1}), s);
}

TEST(build_subspace, rejects_empty_ranges) {
  EXPECT_THROW(build_subspace({0, 0, 2, 1}), PreconditionError);
  EXPECT_THROW(build_subspace({2, 1, 0, 0}), PreconditionError);
  EXPECT_THROW(build_subspace({-1, 0, 0, 0}), PreconditionError);
}

TEST(subspace, rejects_duplicates) { EXPECT_THROW(Subspace({{1, 0}, {1, 0}}), PreconditionError); }

TEST(ell_shift, examples) {
  const Subspace sym = build_subspace({0, 0, -2, 2});
  EXPECT_EQ(ell_shift(sym, 2), build_subspace({0, 0, 0, 4}));
  EXPECT_EQ(ell_shift(sym, 0), sym);
  EXPECT_EQ(ell_shift(ell_shift(sym, 3), -3), sym);
}

TEST(subspace, flip_permutation) {
  const Subspace s = build_subspace({0, 1, -1, 1});
  EXPECT_TRUE(s.is_flip_symmetric());
  const auto perm = s.flip_permutation();
  for (std::size_t i = 0; i < s.dim(); ++i) EXPECT_EQ(s[perm[i]], (ModeIndex{-s[i].ell, s[i].p}));
  EXPECT_FALSE(build_subspace({0, 0, 0, 2}).is_flip_symmetric());
  EXPECT_THROW(build_subspace({0, 0, 0, 2}).flip_permutation(), PreconditionError);
}
