// Copyright 2026 The natbias Authors.
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

#include "natbias/stats.h"

#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "natbias/error.h"
#include "natbias/random.h"
#include "oracles.h"

namespace natbias::stats {
namespace {

using natbias::testing::EnumeratedWilcoxonP;

std::vector<double> Gaussian(std::size_t n, uint64_t seed, double mean = 0.0) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = mean + rng.Normal();
  return v;
}

TEST(WilcoxonTest, FivePositiveDiffs) {
  const std::vector<double> d = {0.1, 0.2, 0.3, 0.4, 0.5};
  const WilcoxonResult r = WilcoxonSignedRank(d);
  EXPECT_EQ(r.w_statistic, 15.0);
  EXPECT_EQ(r.n_effective, 5u);
  EXPECT_EQ(r.mode, WilcoxonMode::kExact);
  EXPECT_EQ(r.p_two_sided, 0.0625);
}

TEST(WilcoxonTest, SymmetricPairsGiveExpectedW) {
  const std::vector<double> d = {1, -1, 2, -2, 3, -3, 4, -4};
  const WilcoxonResult r = WilcoxonSignedRank(d);
  EXPECT_DOUBLE_EQ(r.w_statistic, 8.0 * 9.0 / 4.0);
  EXPECT_DOUBLE_EQ(r.p_two_sided, 1.0);
}

TEST(WilcoxonTest, ZerosDroppedAndTiesAveraged) {
  const std::vector<double> d = {0.0, 1.0, 1.0, -2.0, 0.0, 3.0};
  const WilcoxonResult r = WilcoxonSignedRank(d);
  EXPECT_EQ(r.n_effective, 4u);
  // Ranks 1.5, 1.5, 3, 4; positives 1.5 + 1.5 + 4.
  EXPECT_DOUBLE_EQ(r.w_statistic, 7.0);
  EXPECT_NEAR(r.p_two_sided, EnumeratedWilcoxonP(d), 1e-15);
}

TEST(WilcoxonTest, AllZeroIsDegenerate) {
  const std::vector<double> d = {0.0, 0.0, 0.0};
  const WilcoxonResult r = WilcoxonSignedRank(d);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.p_two_sided, 1.0);
  EXPECT_EQ(r.n_effective, 0u);
  EXPECT_THROW(WilcoxonSignedRank(std::vector<double>{}), Error);
}

TEST(WilcoxonTest, ExactMatchesEnumerationWithTies) {
  Rng rng(21);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> d(n);
      // Small integer support forces ties and zeros.
      for (double& x : d) x = static_cast<double>(rng.Below(7)) - 3.0;
      const WilcoxonResult r = WilcoxonSignedRank(d, WilcoxonMethod::kExact);
      if (r.degenerate) continue;
      EXPECT_NEAR(r.p_two_sided, EnumeratedWilcoxonP(d), 1e-12) << "n=" << n;
    }
  }
}

TEST(WilcoxonTest, StatisticBounds) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.Below(40);
    const std::vector<double> d = Gaussian(n, rng.NextU64(), 0.3);
    const WilcoxonResult r = WilcoxonSignedRank(d);
    const double nn = static_cast<double>(r.n_effective);
    EXPECT_GE(r.w_statistic, 0.0);
    EXPECT_LE(r.w_statistic, nn * (nn + 1) / 2);
    EXPECT_GE(r.p_two_sided, 0.0);
    EXPECT_LE(r.p_two_sided, 1.0);
    EXPECT_EQ(r.mode, n <= kExactWilcoxonLimit ? WilcoxonMode::kExact
                                               : WilcoxonMode::kNormalApprox);
  }
}

TEST(WilcoxonTest, NormalApproxTracksExact) {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    const std::vector<double> d = Gaussian(20, 100 + seed, 0.2);
    const double exact = WilcoxonSignedRank(d, WilcoxonMethod::kExact).p_two_sided;
    const double approx = WilcoxonSignedRank(d, WilcoxonMethod::kNormalApprox).p_two_sided;
    EXPECT_NEAR(approx, exact, 0.01) << "seed " << seed;
  }
  const std::vector<double> big = Gaussian(40, 7);
  EXPECT_EQ(WilcoxonSignedRank(big).mode, WilcoxonMode::kNormalApprox);
}

TEST(WilcoxonTest, NormalApproxWithTiesMatchesReference) {
  // Reference: tie-corrected normal approximation with continuity
  // correction, as computed by SciPy 1.x wilcoxon(method="approx").
  const std::vector<double> d = {0.5, -1.2, 1.2, 2.0, 2.0, -0.3, 0.0, 1.1, -2.5, 3.0,
                                 0.7, 0.7, -0.7, 1.5, 2.2, -0.1, 0.9, 1.3, 1.3, -1.3,
                                 0.4, 2.8, -0.6, 1.7, 0.2, 0.0, 1.9, -0.8, 2.4, 0.3};
  const WilcoxonResult r = WilcoxonSignedRank(d);
  EXPECT_EQ(r.n_effective, 28u);
  EXPECT_DOUBLE_EQ(r.w_statistic, 28.0 * 29.0 / 2.0 - 89.0);
  EXPECT_NEAR(r.p_two_sided, 0.009724395731876037, 1e-12);
}

TEST(WilcoxonTest, OrderInvariant) {
  std::vector<double> d = Gaussian(15, 3, 0.4);
  const double p = WilcoxonSignedRank(d).p_two_sided;
  Rng rng(1);
  rng.Shuffle(std::span<double>(d));
  EXPECT_EQ(WilcoxonSignedRank(d).p_two_sided, p);
}

TEST(PearsonTest, PerfectLine) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  const PearsonResult r = Pearson(x, y);
  EXPECT_DOUBLE_EQ(r.r, 1.0);
  EXPECT_EQ(r.p_two_sided, 0.0);
  EXPECT_EQ(r.n, 5u);
}

TEST(PearsonTest, ThreePointsByHand) {
  // Centered x = (-1, 0, 1), centered y = (-2/3, 1/3, 1/3): cov sum 1,
  // sxx 2, syy 2/3, so r = 1 / sqrt(4/3) = sqrt(3)/2. With one degree of
  // freedom t = sqrt(3) and the t(1) tail gives p = 1 - 2/3 = 1/3.
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> y = {1, 2, 2};
  const PearsonResult r = Pearson(x, y);
  EXPECT_NEAR(r.r, std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_NEAR(r.p_two_sided, 1.0 / 3.0, 1e-12);
}

TEST(PearsonTest, SymmetryAndAffineInvariance) {
  const std::vector<double> x = Gaussian(25, 1);
  std::vector<double> y = Gaussian(25, 2);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.5 * x[i];
  const PearsonResult base = Pearson(x, y);
  EXPECT_NEAR(base.r, natbias::testing::NaivePearson(x, y), 1e-12);
  EXPECT_NEAR(Pearson(y, x).r, base.r, 1e-15);
  std::vector<double> scaled, flipped;
  for (double v : x) {
    scaled.push_back(3.5 * v - 2.0);
    flipped.push_back(-0.25 * v + 9.0);
  }
  EXPECT_NEAR(Pearson(scaled, y).r, base.r, 1e-12);
  EXPECT_NEAR(Pearson(flipped, y).r, -base.r, 1e-12);
  EXPECT_NEAR(Pearson(flipped, y).p_two_sided, base.p_two_sided, 1e-10);
}

TEST(PearsonTest, PValueMatchesStudentT) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.Below(60);
    const std::vector<double> x = Gaussian(n, rng.NextU64());
    std::vector<double> y = Gaussian(n, rng.NextU64());
    for (std::size_t i = 0; i < n; ++i) y[i] += 0.3 * x[i];
    const PearsonResult r = Pearson(x, y);
    const double dof = static_cast<double>(n - 2);
    const double t = r.r * std::sqrt(dof / (1 - r.r * r.r));
    const boost::math::students_t dist(dof);
    const double expected = 2 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    EXPECT_NEAR(r.p_two_sided, expected, 1e-10) << "n=" << n;
  }
}

TEST(PearsonTest, PMonotoneInAbsR) {
  double previous = 1.0;
  for (double r = 0.0; r < 0.99; r += 0.05) {
    const double t = r * std::sqrt(10.0 / (1 - r * r));
    const double p = StudentTTwoSided(t, 10.0);
    EXPECT_LE(p, previous);
    previous = p;
  }
}

TEST(PearsonTest, Errors) {
  const std::vector<double> a = {1, 2, 3};
  EXPECT_THROW(Pearson(a, std::vector<double>{1, 2}), Error);
  EXPECT_THROW(Pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
  EXPECT_THROW(Pearson(a, std::vector<double>{4, 4, 4}), Error);
}

TEST(SpecialFunctionTest, IncompleteBetaAgainstBoost) {
  for (double a : {0.5, 1.0, 2.5, 7.0, 30.0}) {
    for (double b : {0.5, 1.0, 3.0, 14.0}) {
      for (double x : {0.0, 0.01, 0.2, 0.5, 0.77, 0.99, 1.0}) {
        EXPECT_NEAR(RegularizedIncompleteBeta(a, b, x), boost::math::ibeta(a, b, x), 1e-10)
            << a << " " << b << " " << x;
      }
    }
  }
}

TEST(SpecialFunctionTest, StudentTAndNormalTails) {
  for (double dof : {1.0, 2.0, 5.0, 28.0, 200.0}) {
    const boost::math::students_t dist(dof);
    for (double t : {0.0, 0.3, 1.0, 2.05, 4.0, 12.0}) {
      const double expected = 2 * boost::math::cdf(boost::math::complement(dist, t));
      EXPECT_NEAR(StudentTTwoSided(t, dof), expected, 1e-10);
      EXPECT_NEAR(StudentTTwoSided(-t, dof), expected, 1e-10);
    }
  }
  const boost::math::normal unit;
  for (double z : {-3.0, -0.5, 0.0, 1.0, 1.96, 5.0}) {
    EXPECT_NEAR(NormalUpperTail(z), boost::math::cdf(boost::math::complement(unit, z)), 1e-12);
  }
}

TEST(BootstrapTest, ConstantSamples) {
  const std::vector<double> c(10, 0.25);
  const BootstrapCI ci = BootstrapMeanCI(c, 1000, 0.95, 1);
  EXPECT_EQ(ci.low, 0.25);
  EXPECT_EQ(ci.high, 0.25);
}

TEST(BootstrapTest, StandardNormalWidth) {
  const std::vector<double> z = Gaussian(1000, 77);
  const BootstrapCI ci = BootstrapMeanCI(z, 1000, 0.95, 5);
  const double clt_width = 2 * 1.96 / std::sqrt(1000.0);
  EXPECT_NEAR(ci.high - ci.low, clt_width, 0.15 * clt_width);
  EXPECT_LT(ci.low, 0.0);
  EXPECT_GT(ci.high, 0.0);
  EXPECT_GT(ci.low, -0.12);
  EXPECT_LT(ci.high, 0.12);
}

TEST(BootstrapTest, DeterministicAndSeedSensitive) {
  const std::vector<double> z = Gaussian(50, 3);
  const BootstrapCI a = BootstrapMeanCI(z, 500, 0.95, 9);
  const BootstrapCI b = BootstrapMeanCI(z, 500, 0.95, 9);
  const BootstrapCI c = BootstrapMeanCI(z, 500, 0.95, 10);
  EXPECT_EQ(a.low, b.low);
  EXPECT_EQ(a.high, b.high);
  EXPECT_NE(a.low, c.low);
}

TEST(BootstrapTest, ContainsPointEstimate) {
  Rng rng(30);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> s = Gaussian(2 + rng.Below(100), rng.NextU64(), 0.1);
    const BootstrapCI ci = BootstrapMeanCI(s, 400, 0.95, rng.NextU64());
    EXPECT_LE(ci.low, ci.high);
    const double m = Mean(s);
    if (s.size() >= 5) {
      EXPECT_LE(ci.low, m);
      EXPECT_GE(ci.high, m);
    }
  }
}

TEST(BootstrapTest, WidthShrinksWithN) {
  double previous = 1e9;
  for (std::size_t n : {100, 400, 1600}) {
    const std::vector<double> s = Gaussian(n, 40 + n);
    const BootstrapCI ci = BootstrapMeanCI(s, 1000, 0.95, 1);
    const double width = ci.high - ci.low;
    EXPECT_LT(width, previous);
    EXPECT_NEAR(width * std::sqrt(static_cast<double>(n)), 2 * 1.96, 0.6);
    previous = width;
  }
}

TEST(BootstrapTest, Errors) {
  const std::vector<double> s = {1.0, 2.0};
  EXPECT_THROW(BootstrapMeanCI(std::vector<double>{1.0}, 1000, 0.95, 1), Error);
  EXPECT_THROW(BootstrapMeanCI(s, 99, 0.95, 1), Error);
  EXPECT_THROW(BootstrapMeanCI(s, 1000, 1.0, 1), Error);
}

TEST(QuantileTest, Type7) {
  const std::vector<double> s = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(QuantileSorted(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(QuantileSorted(s, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(QuantileSorted(s, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(QuantileSorted(s, 0.25), 1.75);
}

}  // namespace
}  // namespace natbias::stats
