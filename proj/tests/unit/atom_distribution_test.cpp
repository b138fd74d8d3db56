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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wigner_lab/atom_distribution.hpp"
#include "wigner_lab/random.hpp"

namespace wigner_lab {
namespace {

AtomDistribution rademacher() { return AtomDistribution::discrete({{1.0, 0.5}, {-1.0, 0.5}}); }

AtomDistribution three_point_literal() {
  const double s = std::sqrt(3.0);
  return AtomDistribution::discrete({{s, 1.0 / 6.0}, {-s, 1.0 / 6.0}, {0.0, 2.0 / 3.0}});
}

TEST(Moment, GaussianFourthMomentAgreesWithQuadrature) {
  const double quad = oracle::simpson([](double x) { return std::pow(x, 4) * oracle::normal_pdf(x); }, -14, 14);
  EXPECT_NEAR(quad, 3.0, 1e-9);
  EXPECT_NEAR(moment(AtomDistribution::gaussian_real(0, 1), 4, 0), quad, 1e-9);
}

TEST(Moment, ShiftedGaussianAgreesWithQuadrature) {
  const auto d = AtomDistribution::gaussian_real(0.7, 2.5);
  const double sd = std::sqrt(2.5);
  for (int a = 0; a <= 6; ++a) {
    const double quad = oracle::simpson(
        [&](double x) { return std::pow(x, a) * oracle::normal_pdf((x - 0.7) / sd) / sd; }, 0.7 - 14 * sd,
        0.7 + 14 * sd);
    EXPECT_NEAR(moment(d, a, 0), quad, 1e-8 * std::max(1.0, std::abs(quad))) << "a=" << a;
  }
}

TEST(Moment, ComplexGaussianSplitsVarianceEvenly) {
  const auto d = AtomDistribution::gaussian_complex(1.0);
  EXPECT_NEAR(moment(d, 2, 0), 0.5, 1e-15);
  EXPECT_NEAR(moment(d, 0, 2), 0.5, 1e-15);
  EXPECT_NEAR(moment(d, 2, 2), 0.25, 1e-15);  // independent parts
  EXPECT_NEAR(moment(d, 4, 0), 3 * 0.25, 1e-15);
  EXPECT_EQ(moment(d, 1, 1), 0.0);
}

TEST(Moment, ThreePointSecondMomentIsOne) { EXPECT_NEAR(moment(three_point_literal(), 2, 0), 1.0, 1e-15); }

TEST(Moment, OddMomentsOfSymmetricLawsVanish) {
  const auto d = AtomDistribution::discrete({{2.0, 0.1}, {-2.0, 0.1}, {0.5, 0.4}, {-0.5, 0.4}});
  for (int a : {1, 3, 5, 7}) EXPECT_NEAR(moment(d, a, 0), 0.0, 1e-15);
}

TEST(Moment, RejectsOrderAboveCeiling) {
  EXPECT_NO_THROW(moment(rademacher(), 12, 0));
  EXPECT_THROW(moment(rademacher(), 13, 0), UnsupportedOrder);
  EXPECT_THROW(moment(rademacher(), 7, 6), UnsupportedOrder);
}

TEST(MomentTable, HasUnitZeroEntryAndNoImaginaryPartForRealLaws) {
  const auto t = moment_table(three_point_literal(), 6);
  EXPECT_EQ(t.entries.at({0, 0}), 1.0);
  for (const auto& [ab, value] : t.entries) {
    if (ab.second >= 1) {
      EXPECT_EQ(value, 0.0);
    }
  }
}

TEST(Matching, GaussianAndThreePointMatchToOrderFour) {
  EXPECT_TRUE(matches_to_order(AtomDistribution::gaussian_real(0, 1), three_point_literal(), 4));
  EXPECT_FALSE(matches_to_order(AtomDistribution::gaussian_real(0, 1), three_point_literal(), 6));
}

TEST(Matching, RademacherMatchesGaussianOnlyToOrderThree) {
  EXPECT_FALSE(matches_to_order(AtomDistribution::gaussian_real(0, 1), rademacher(), 4));
  EXPECT_TRUE(matches_to_order(AtomDistribution::gaussian_real(0, 1), rademacher(), 3));
}

TEST(Matching, IsReflexive) {
  for (const auto& d : {rademacher(), three_point_literal(), AtomDistribution::gaussian_complex(2.0)})
    for (int k = 1; k <= 12; ++k) EXPECT_TRUE(matches_to_order(d, d, k));
}

TEST(ThreePoint, FourthMomentThreeGivesSixthAtomsAtRootThree) {
  const auto d = symmetric_three_point(3.0);
  ASSERT_EQ(d.atoms().size(), 3u);
  for (const auto& atom : d.atoms()) {
    if (atom.value == Complex(0.0)) {
      EXPECT_NEAR(atom.prob, 2.0 / 3.0, 1e-15);
    } else {
      EXPECT_NEAR(std::abs(atom.value.real()), std::sqrt(3.0), 1e-15);
      EXPECT_NEAR(atom.prob, 1.0 / 6.0, 1e-15);
    }
  }
}

TEST(ThreePoint, FourthMomentOneDropsTheZeroAtom) {
  const auto d = symmetric_three_point(1.0);
  ASSERT_EQ(d.atoms().size(), 2u);
  for (const auto& atom : d.atoms()) {
    EXPECT_EQ(std::abs(atom.value), 1.0);
    EXPECT_EQ(atom.prob, 0.5);
  }
}

TEST(ThreePoint, FourthMomentBelowOneIsInfeasible) { EXPECT_THROW(symmetric_three_point(0.5), Infeasible); }

TEST(ThreePoint, MomentsAreAsPrescribed) {
  for (double m4 : {1.0, 1.5, 3.0, 7.25}) {
    const auto d = symmetric_three_point(m4);
    EXPECT_NEAR(moment(d, 1, 0), 0.0, 1e-12);
    EXPECT_NEAR(moment(d, 2, 0), 1.0, 1e-12);
    EXPECT_NEAR(moment(d, 3, 0), 0.0, 1e-12);
    EXPECT_NEAR(moment(d, 4, 0), m4, 1e-12);
    EXPECT_EQ(matches_to_order(d, AtomDistribution::gaussian_real(0, 1), 4, 1e-12), m4 == 3.0) << m4;
  }
}

TEST(Discrete, RejectsBadAtoms) {
  EXPECT_THROW(AtomDistribution::discrete({{1.0, 0.5}, {-1.0, 0.4}}), InvalidArgument);
  EXPECT_THROW(AtomDistribution::discrete({{1.0, 0.5}, {1.0, 0.5}}), InvalidArgument);
  EXPECT_THROW(AtomDistribution::discrete({{1.0, 1.0}, {2.0, 0.0}}), InvalidArgument);
  EXPECT_THROW(AtomDistribution::gaussian_real(0.0, -1.0), InvalidArgument);
}

TEST(ConditionC1, ClosedFormValues) {
  EXPECT_NEAR(condition_c1_bound(rademacher(), 4.0), 1.0, 1e-15);
  EXPECT_NEAR(condition_c1_bound(three_point_literal(), 4.0), 3.0, 1e-14);
  EXPECT_NEAR(condition_c1_bound(AtomDistribution::gaussian_real(0, 1), 2.0), 1.0, 1e-12);
}

TEST(ConditionC1, NonIntegerExponentAgreesWithQuadrature) {
  const double quad =
      oracle::simpson([](double x) { return std::pow(std::abs(x), 2.5) * oracle::normal_pdf(x); }, -14, 14, 200000);
  EXPECT_NEAR(condition_c1_bound(AtomDistribution::gaussian_real(0, 1), 2.5), quad, 1e-6);
  const double quad_c = oracle::simpson(
      [](double r) { return std::pow(r, 3.0) * 2.0 * r * std::exp(-r * r); }, 0, 12, 200000);
  EXPECT_NEAR(condition_c1_bound(AtomDistribution::gaussian_complex(1.0), 3.0), quad_c, 1e-6);
}

TEST(Constructed, MeansZeroAndVarianceAsPrescribed) {
  const auto half = scaled(symmetric_three_point(3.0), std::sqrt(0.5));
  const std::vector<std::pair<AtomDistribution, double>> cases{
      {AtomDistribution::gaussian_real(0, 2), 2.0},
      {AtomDistribution::gaussian_complex(1), 1.0},
      {symmetric_three_point(3.0), 1.0},
      {scaled(symmetric_three_point(3.0), std::sqrt(2.0)), 2.0},
      {independent_complex(half, half), 1.0}};
  for (const auto& [d, var] : cases) {
    EXPECT_NEAR(moment(d, 1, 0), 0.0, 1e-12);
    EXPECT_NEAR(moment(d, 0, 1), 0.0, 1e-12);
    EXPECT_NEAR(moment(d, 2, 0) + moment(d, 0, 2), var, 1e-12);
  }
}

TEST(Sampler, EmpiricalMomentsWithinFourStandardErrors) {
  const auto half = scaled(symmetric_three_point(3.0), std::sqrt(0.5));
  const std::vector<AtomDistribution> laws{AtomDistribution::gaussian_real(0.3, 2.0),
                                           AtomDistribution::gaussian_complex(1.0), symmetric_three_point(3.0),
                                           independent_complex(half, half)};
  const int draws = 100000;
  for (std::size_t l = 0; l < laws.size(); ++l) {
    AtomSampler sampler(laws[l]);
    Engine rng = make_engine(1000 + l);
    std::vector<Complex> xs(draws);
    for (auto& x : xs) x = sampler(rng);
    for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}, {4, 0}}) {
      double sum = 0.0, sum2 = 0.0;
      for (const auto& x : xs) {
        const double v = std::pow(x.real(), a) * std::pow(x.imag(), b);
        sum += v;
        sum2 += v * v;
      }
      const double mean = sum / draws;
      const double se = std::sqrt(std::max(sum2 / draws - mean * mean, 0.0) / draws);
      EXPECT_LE(std::abs(mean - moment(laws[l], a, b)), 4 * se + 1e-12) << "law " << l << " (" << a << "," << b << ")";
    }
  }
}

TEST(Sampler, IdenticalSeedGivesIdenticalStream) {
  for (const auto& d : {AtomDistribution::gaussian_complex(1.0), symmetric_three_point(3.0)}) {
    AtomSampler s1(d), s2(d);
    Engine r1 = make_engine(42), r2 = make_engine(42);
    for (int k = 0; k < 1000; ++k) ASSERT_EQ(s1(r1), s2(r2));
  }
}

TEST(AtomJson, RoundTripsThroughFile) {
  const auto half = scaled(symmetric_three_point(3.0), std::sqrt(0.5));
  const auto d = independent_complex(half, half);
  const std::string path = ::testing::TempDir() + "atoms.json";
  {
    std::ofstream out(path);
    out << to_json(d).dump();
  }
  const auto back = load_atom_file(path);
  EXPECT_TRUE(matches_to_order(d, back, 12, 1e-15));
  std::remove(path.c_str());
}

TEST(AtomJson, MalformedInputIsRejected) {
  EXPECT_THROW(atom_distribution_from_json(nlohmann::json::parse(R"({"values": []})")), InvalidArgument);
  EXPECT_THROW(atom_distribution_from_json(nlohmann::json::parse(R"({"atoms": [{"re": 1}]})")), InvalidArgument);
  EXPECT_THROW(load_atom_file("/nonexistent/atoms.json"), InvalidArgument);
}

}  // namespace
}  // namespace wigner_lab
