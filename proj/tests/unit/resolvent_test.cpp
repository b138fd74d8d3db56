// Copyright 2026 The wigner-lab Authors.
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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wigner_lab/ensembles.hpp"
#include "wigner_lab/resolvent.hpp"
#include "wigner_lab/spectral.hpp"

namespace wigner_lab {
namespace {

MatrixSample fixed(const Eigen::MatrixXd& m) { return {m, goe_spec(static_cast<std::size_t>(m.rows())), 0}; }

std::vector<Complex> msc_grid() {
  std::vector<Complex> zs;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b)
      zs.emplace_back(-3.0 + 6.0 * a / 9.0, std::pow(10.0, -3.0 + 4.0 * b / 9.0));
  return zs;
}

TEST(Msc, ClosedFormPoints) {
  EXPECT_NEAR(std::abs(m_sc({0, 2}) - Complex(0, std::sqrt(2.0) - 1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(m_sc({0, 1}) - Complex(0, (std::sqrt(5.0) - 1) / 2)), 0.0, 1e-12);
}

TEST(Msc, SolvesQuadraticOnGrid) {
  for (const Complex z : msc_grid()) {
    const Complex m = m_sc(z);
    EXPECT_LE(std::abs(m * m + z * m + 1.0), 1e-12) << z;
    EXPECT_GT(m.imag(), 0.0) << z;
  }
}

TEST(Msc, AgreesWithStieltjesIntegral) {
  for (const Complex z : {Complex(0.3, 0.5), Complex(-1.7, 0.2), Complex(2.5, 1.0), Complex(0, 3)})
    EXPECT_LE(std::abs(m_sc(z) - oracle::semicircle_stieltjes(z)), 1e-6) << z;
}

TEST(Msc, LaurentTail) {
  for (const Complex z : {Complex(10, 0), Complex(0, 12), Complex(-9, 9), Complex(30, -4), Complex(-15, 0)})
    EXPECT_LE(std::abs(m_sc(z) + 1.0 / z), 2.0 / std::pow(std::abs(z), 3)) << z;
}

TEST(Msc, CutNeedsBoundaryMode) {
  EXPECT_THROW(m_sc({0.5, 0.0}), InvalidArgument);
  const Complex m = m_sc({0.0, 0.0}, BoundaryMode::limit_from_above);
  EXPECT_NEAR(std::abs(m - Complex(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(m_sc({3.0, 0.0}).imag(), 0.0, 1e-15);
  EXPECT_NEAR(m_sc({3.0, 0.0}).real(), (-3.0 + std::sqrt(5.0)) / 2, 1e-15);
}

TEST(Direct, HandExamples) {
  EXPECT_NEAR(std::abs(resolvent_coeff_direct(fixed(Eigen::MatrixXd::Constant(1, 1, 2.0)), 0.0, 1, 1) - 0.5), 0, 1e-15);
  const auto zero = fixed(Eigen::MatrixXd::Zero(2, 2));
  EXPECT_NEAR(std::abs(resolvent_coeff_direct(zero, {0, 1}, 1, 1) - Complex(0, 1)), 0, 1e-15);
  EXPECT_NEAR(std::abs(resolvent_coeff_direct(zero, {0, 1}, 2, 2) - Complex(0, 1)), 0, 1e-15);
  EXPECT_EQ(resolvent_coeff_direct(zero, {0, 1}, 1, 2), Complex(0.0));
  EXPECT_THROW(resolvent_coeff_direct(zero, {0, 1}, 3, 1), IndexError);
}

TEST(Direct, SingularityCarriesMargin) {
  try {
    resolvent_coeff_direct(fixed(Eigen::MatrixXd::Constant(1, 1, 2.0)), 2.0, 1, 1);
    FAIL() << "expected Singularity";
  } catch (const Singularity& e) {
    EXPECT_LE(e.margin(), 1e-12);
  }
}

TEST(Routes, AgreeOnRandomGoe) {
  const std::size_t n = 50;
  const auto m = sample(goe_spec(n), 21);
  const auto d = decompose_rescaled(m, Normalization::raw());
  const Complex z(0.3, 0.5);
  for (std::size_t p = 1; p <= n; p += 7)
    for (std::size_t q = 1; q <= n; q += 9) {
      const Complex a = resolvent_coeff_direct(m, z, p, q);
      const Complex b = resolvent_coeff_spectral(d, z, p, q, n);
      EXPECT_LE(std::abs(a - b), 1e-8 * (1 + std::abs(a)));
    }
}

TEST(Routes, AgreeOnRandomHermitianPairs) {
  int compared = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t n = 30;
    const auto m = sample(s % 2 ? gue_spec(n) : matched_goe_spec(n), derive_seed(40, s));
    const auto d = decompose_rescaled(m, Normalization::random(s));
    Engine rng = make_engine(s);
    const Complex z(4.0 * uniform01(rng) - 2.0, s % 3 == 0 ? 0.0 : uniform01(rng));
    if (level_repulsion_margin(d, z, n) < 1e-6 * n) continue;
    ++compared;
    const Complex a = resolvent_coeff_direct(m, z, 2, 5);
    EXPECT_LE(std::abs(a - resolvent_coeff_spectral(d, z, 2, 5, n)), 1e-8 * (1 + std::abs(a)));
  }
  EXPECT_GE(compared, 90);
}

TEST(Spectral, RealOutsideSpectrumForRealSymmetric) {
  const std::size_t n = 40;
  const auto d = decompose_rescaled(sample(goe_spec(n), 3), Normalization::adhoc());
  for (std::size_t p = 1; p <= 5; ++p) EXPECT_LE(std::abs(resolvent_coeff_spectral(d, 3.5, p, p + 1, n).imag()), 1e-10);
}

TEST(Spectral, DiagonalHasNonnegativeImaginaryPart) {
  const std::size_t n = 40;
  const auto d = decompose_rescaled(sample(gue_spec(n), 3), Normalization::random(1));
  for (std::size_t p = 1; p <= n; ++p) EXPECT_GE(resolvent_coeff_spectral(d, {0.1, 0.01}, p, p, n).imag(), -1e-12);
}

TEST(Spectral, ZeroDenominatorIsSingular) {
  const Eigen::MatrixXd m = Eigen::Vector2d(1.0, 3.0).asDiagonal();
  const auto d = decompose(m, Normalization::raw());
  EXPECT_THROW(resolvent_coeff_spectral(d, 1.5, 1, 1, 2), Singularity);
}

TEST(Resolvent, ConjugateSymmetryForRealSymmetric) {
  const auto m = sample(goe_spec(25), 8);
  const Complex z(0.4, 0.3);
  for (std::size_t p = 1; p <= 25; p += 6)
    for (std::size_t q = 1; q <= 25; q += 5)
      EXPECT_LE(std::abs(resolvent_coeff_direct(m, std::conj(z), p, q) - std::conj(resolvent_coeff_direct(m, z, q, p))), 1e-10);
}

TEST(Margin, HandExamplesAndImaginaryBound) {
  const Eigen::MatrixXd m = Eigen::Vector2d(1.0, 3.0).asDiagonal();
  const auto d = decompose(m, Normalization::raw());
  EXPECT_EQ(level_repulsion_margin(d, 1.0, 2), 1.0);
  const std::size_t n = 50;
  const auto g = decompose_rescaled(sample(goe_spec(n), 1), Normalization::raw());
  EXPECT_GE(level_repulsion_margin(g, {0.2, 3.0}, n), 3.0 * n);
}

TEST(Margin, RarelySmallAtZero) {
  const std::size_t n = 100;
  int ok = 0;
  for (int s = 0; s < 500; ++s) {
    const auto d = decompose_rescaled(sample(goe_spec(n), derive_seed(77, s)), Normalization::raw());
    ok += level_repulsion_margin(d, 0.0, n) > 1.0 / (n * n);
  }
  EXPECT_GE(ok, 475);
}

TEST(Rigidity, TrivialWindows) {
  const std::size_t n = 30;
  const auto d = decompose_rescaled(sample(goe_spec(n), 2), Normalization::raw());
  const Complex z(0.1, 0.05), z0(0.1, 0.5);
  const auto full = rigidity_split(d, {1, n}, z, z0, 1, 2, n);
  EXPECT_EQ(full.far_sum, Complex(0.0));
  const auto none = rigidity_split(d, {1, 0}, z, z0, 1, 2, n);
  EXPECT_EQ(none.near_sum, Complex(0.0));
  const auto part = rigidity_split(d, {10, 20}, z, z0, 1, 2, n);
  const Complex diff = resolvent_coeff_spectral(d, z, 1, 2, n) - resolvent_coeff_spectral(d, z0, 1, 2, n);
  EXPECT_LE(std::abs(part.near_sum + part.far_sum - diff), 1e-10);
  EXPECT_THROW(rigidity_split(d, {0, 5}, z, z0, 1, 2, n), IndexError);
}

struct RigiditySetup {
  std::size_t n = 200;
  Complex z{0.0, 1.0 / 200.0};
  Complex z0{0.0, 1.0 / std::sqrt(200.0)};
  IndexWindow window = window_around(classical_index(0.0, 200), std::pow(200.0, 0.3), 200);
};

TEST(Rigidity, WindowAroundClassicalIndex) {
  const RigiditySetup s;
  EXPECT_EQ(classical_index(0.0, s.n), 100u);
  EXPECT_EQ(s.window.lo, 96u);
  EXPECT_EQ(s.window.hi, 104u);
}

TEST(Rigidity, FarSumSmallOffDiagonal) {
  const RigiditySetup s;
  int ok = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto d = decompose_rescaled(sample(goe_spec(s.n), derive_seed(2718, seed)), Normalization::raw());
    ok += std::abs(rigidity_split(d, s.window, s.z, s.z0, 1, 2, s.n).far_sum) <= 0.5;
  }
  EXPECT_GE(ok, 90);
}

// For p = q the weights n P_{i,p,p} have mean one, so the far sum
// concentrates around the sum of F over classical locations.
TEST(Rigidity, DiagonalFarSumMatchesClassicalLocations) {
  const RigiditySetup s;
  const double n = static_cast<double>(s.n);
  Complex predicted = 0.0;
  for (std::size_t i = 1; i <= s.n; ++i) {
    if (s.window.contains(i)) continue;
    const double gamma = oracle::invert(oracle::semicircle_cdf, (static_cast<double>(i) - 0.5) / n, -2.0, 2.0);
    const double x = n * gamma;
    predicted += 1.0 / (x - n * s.z) - 1.0 / (x - n * s.z0);
  }
  Complex mean = 0.0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto d = decompose_rescaled(sample(goe_spec(s.n), derive_seed(2718, seed)), Normalization::raw());
    mean += rigidity_split(d, s.window, s.z, s.z0, 1, 1, s.n).far_sum;
  }
  mean /= static_cast<double>(seeds);
  EXPECT_LE(std::abs(mean - predicted), 0.05) << "mean " << mean << " predicted " << predicted;
}

TEST(LocalLaw, ZeroMatrixClosedForm) {
  const auto zero = fixed(Eigen::MatrixXd::Zero(3, 3));
  const Complex z(0, 10);
  const double exact = std::abs(Complex(0, 0.1) - m_sc(z));
  EXPECT_NEAR(local_law_deviation(zero, z), exact, 1e-15);
  EXPECT_NEAR(m_sc(z).imag(), (std::sqrt(104.0) - 10.0) / 2.0, 1e-14);
  EXPECT_NEAR(exact, 0.1 - (std::sqrt(104.0) - 10.0) / 2.0, 1e-14);
  EXPECT_THROW(local_law_deviation(zero, {0.5, 0.0}), InvalidArgument);
}

TEST(LocalLaw, InvariantUnderPermutationConjugation) {
  const auto m = sample(goe_spec(30), 5);
  const Eigen::MatrixXd a = std::get<Eigen::MatrixXd>(m.matrix);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(30);
  perm.setIdentity();
  std::reverse(perm.indices().data(), perm.indices().data() + 10);
  const Eigen::MatrixXd b = perm * a * perm.transpose();
  const MatrixSample pm{b, m.spec, m.seed};
  const Complex z(0.1, 0.1);
  EXPECT_NEAR(local_law_deviation(m, z), local_law_deviation(pm, z), 1e-12);
}

TEST(Inverse, HandExamples) {
  EXPECT_NEAR(std::abs(inverse_coeff(fixed(Eigen::MatrixXd::Constant(1, 1, 2.0)), 1, 1) - 0.5), 0, 1e-15);
  const Eigen::MatrixXd swap = (Eigen::MatrixXd(2, 2) << 0, std::sqrt(2.0), std::sqrt(2.0), 0).finished();
  EXPECT_NEAR(std::abs(inverse_coeff(fixed(swap), 1, 2) - 1.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(inverse_coeff(fixed(swap), 1, 1)), 0, 1e-15);
}

TEST(Inverse, AgreesWithSpectralRoute) {
  const std::size_t n = 50;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto m = sample(goe_spec(n), derive_seed(5, s));
    const auto d = decompose_rescaled(m, Normalization::raw());
    const Complex a = inverse_coeff(m, 3, 4);
    EXPECT_LE(std::abs(a - resolvent_coeff_spectral(d, 0.0, 3, 4, n)), 1e-8 * (1 + std::abs(a)));
  }
}

}  // namespace
}  // namespace wigner_lab
