// Copyright 2026 The R1SMG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "r1smg/analysis.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"

namespace r1smg {
namespace {

PrivacyBudget Budget(double eps, double delta) {
  return *PrivacyBudget::Create(eps, delta);
}

CalibratedMechanism R1smgMech(int64_t m, double sigma_star) {
  return R1smg{sigma_star, m, QueryShape::Vector(m)};
}

NoiseVector Vec(std::vector<double> v) { return NoiseVector{std::move(v)}; }

TEST(LossMomentsTest, R1smgRatiosAreDimensionFree) {
  // L = sigma* z^2: kurtosis E[z^8]/E[z^4]^2 = 105/9, skewness 15/3^{3/2}.
  for (int64_t m : {3, 40}) {
    RngStream rng(101);
    auto stats = LossMoments(R1smgMech(m, 7.5), 1'000'000, rng);
    ASSERT_TRUE(stats.ok());
    EXPECT_NEAR(stats->kurtosis, 35.0 / 3.0, 0.05 * 35.0 / 3.0) << m;
    EXPECT_NEAR(stats->skewness, 5.0 * std::sqrt(3.0) / 3.0,
                0.03 * 5.0 * std::sqrt(3.0) / 3.0)
        << m;
    EXPECT_NEAR(stats->m1, 7.5, 0.01 * 7.5);
    EXPECT_NEAR(stats->m2, 3.0 * 7.5 * 7.5, 0.03 * 3.0 * 7.5 * 7.5);
    EXPECT_GE(stats->kurtosis, 1.0);
  }
}

TEST(LossMomentsTest, ClassicChiSquaredRatio) {
  // U ~ chi^2(100): E[U^4]/E[U^2]^2 = (M+4)(M+6)/(M(M+2)).
  const double expected = 104.0 * 106.0 / (100.0 * 102.0);
  RngStream rng(5);
  auto stats = LossMoments(ClassicGaussian{0.3, QueryShape::Vector(100)}, 200'000, rng);
  ASSERT_TRUE(stats.ok());
  EXPECT_NEAR(stats->kurtosis, expected, 0.02 * expected);
  EXPECT_NEAR(stats->m1, 0.09 * 100, 0.01 * 9.0);
}

TEST(LossMomentsTest, ReproducibleAndJobIndependent) {
  RngStream a(77), b(77), c(77);
  const auto mech = R1smgMech(5, 2.0);
  auto s1 = LossMoments(mech, 200'000, a, 1);
  auto s2 = LossMoments(mech, 200'000, b, 1);
  auto s3 = LossMoments(mech, 200'000, c, 3);
  EXPECT_EQ(s1->m4, s2->m4);
  EXPECT_EQ(s1->kurtosis, s3->kurtosis);
  EXPECT_EQ(s1->skewness, s3->skewness);
  // The caller's stream moves on.
  EXPECT_EQ(a.NextU64(), c.NextU64());
  RngStream fresh(77);
  EXPECT_NE(RngStream(77).NextU64(), b.NextU64());
}

TEST(LossMomentsTest, RejectsTooFewTrials) {
  RngStream rng(1);
  EXPECT_FALSE(LossMoments(R1smgMech(3, 1.0), 999, rng).ok());
}

TEST(PlrvGaussianTest, Examples) {
  const double sigma = 2.0;
  EXPECT_EQ(*PlrvGaussian(sigma, Vec({1, 2, 3}), Vec({0, 0, 0})), 0.0);
  EXPECT_DOUBLE_EQ(*PlrvGaussian(sigma, Vec({0, 0, 0}), Vec({3, 0, 4})),
                   25.0 / 8.0);
  // Orthogonal noise: the cross term vanishes.
  EXPECT_DOUBLE_EQ(*PlrvGaussian(sigma, Vec({0, 5, 0}), Vec({3, 0, 4})),
                   25.0 / 8.0);
  EXPECT_FALSE(PlrvGaussian(sigma, Vec({1, 2}), Vec({1, 2, 3})).ok());
}

TEST(PlrvGaussianTest, DirectEqualsProjectedForm) {
  RngStream rng(8);
  for (int k = 0; k < 1000; ++k) {
    auto n = GaussianVector(rng, 12, 1.7);
    auto v = GaussianVector(rng, 12, 0.3);
    const double direct = *PlrvGaussian(1.7, *n, *v);
    const double projected = *PlrvGaussianProjected(1.7, *n, *v);
    EXPECT_NEAR(direct, projected, 1e-10 * std::max(1e-300, std::abs(direct)) + 1e-15);
  }
}

TEST(PlrvR1smgTest, IdenticalArgumentsGiveZero) {
  RngStream rng(3);
  auto h = UniformUnitVector(rng, 6);
  auto s = GaussianVector(rng, 6, 1.0);
  auto fx = GaussianVector(rng, 6, 1.0);
  EXPECT_EQ(*PlrvR1smg(2.0, *s, *fx, *fx, *h, *h), 0.0);
  EXPECT_FALSE(PlrvR1smg(2.0, *s, *fx, Vec({1, 2}), *h, *h).ok());
}

TEST(PlrvR1smgTest, CauchySchwarzBoundForArbitraryInputs) {
  RngStream rng(4);
  for (int k = 0; k < 2000; ++k) {
    auto h = UniformUnitVector(rng, 7);
    auto g = UniformUnitVector(rng, 7);
    auto s = GaussianVector(rng, 7, 3.0);
    auto fx = GaussianVector(rng, 7, 3.0);
    auto fxp = GaussianVector(rng, 7, 3.0);
    double a = 0.0, b = 0.0;
    for (int i = 0; i < 7; ++i) {
      a += std::pow(s->components[i] - fxp->components[i], 2);
      b += std::pow(s->components[i] - fx->components[i], 2);
    }
    const double bound = std::pow(std::sqrt(a) + std::sqrt(b), 2) / (2.0 * 1.3);
    EXPECT_LE(std::abs(*PlrvR1smg(1.3, *s, *fx, *fxp, *h, *g)), bound * (1 + 1e-12));
  }
}

TEST(PlrvR1smgTest, OnSupportChainHolds) {
  RngStream rng(6);
  const double sigma_star = 4.0, delta2f = 1.0;
  for (int k = 0; k < 20'000; ++k) {
    auto outcome = SampleOnSupportOutcome(rng, 10, sigma_star, delta2f);
    ASSERT_TRUE(outcome.ok());
    double dist = 0.0;
    for (int i = 0; i < 10; ++i) {
      dist += std::pow(outcome->fx.components[i] - outcome->fxp.components[i], 2);
    }
    ASSERT_LE(std::sqrt(dist), delta2f * (1 + 1e-12));
    auto chain = EvaluatePlrvChain(sigma_star, *outcome, delta2f);
    ASSERT_TRUE(chain.ok());
    EXPECT_LE(chain->plrv, chain->projection_bound * (1 + 1e-10) + 1e-300);
    EXPECT_LE(chain->projection_bound, chain->law_of_sines_bound * (1 + 1e-10));
  }
}

TEST(AngleTailBoundTest, ClosedForms) {
  // m = 3: sqrt(pi) Gamma(3/2)/Gamma(1) cos(theta0) = (pi/2) cos(theta0).
  EXPECT_NEAR(*AngleTailBound(3, std::numbers::pi / 3), std::numbers::pi / 4, 1e-14);
  EXPECT_EQ(*AngleTailBound(50, 0.0), 1.0);
  EXPECT_EQ(*AngleTailBound(50, std::numbers::pi / 2), 0.0);
  EXPECT_FALSE(AngleTailBound(2, 0.1).ok());
  EXPECT_FALSE(AngleTailBound(5, 2.0).ok());
}

TEST(AngleTailProbabilityTest, TwoSphereClosedForm) {
  // On S^2 the event |theta - pi/2| >= pi/3 has probability 1 - sin(pi/3).
  RngStream rng(12);
  auto est = AngleTailProbability(3, std::numbers::pi / 3, 200'000, rng);
  ASSERT_TRUE(est.ok());
  const double exact = 1.0 - std::sqrt(3.0) / 2.0;
  EXPECT_NEAR(est->empirical, exact, 4.0 * std::sqrt(exact * (1 - exact) / 2e5));
  EXPECT_LE(est->empirical, est->bound);
}

TEST(AngleTailProbabilityTest, CertainEventAndConcentration) {
  RngStream rng(13);
  auto certain = AngleTailProbability(20, 0.0, 10'000, rng);
  EXPECT_EQ(certain->empirical, 1.0);
  EXPECT_EQ(certain->bound, 1.0);
  auto low = AngleTailProbability(10, 0.3, 50'000, rng);
  auto high = AngleTailProbability(100, 0.3, 50'000, rng);
  EXPECT_LT(high->empirical, low->empirical);
  EXPECT_FALSE(AngleTailProbability(10, 0.3, 100, rng).ok());
}

TEST(AuditR1smgTest, ThreeDimensionalClosedForm) {
  // Failure is sin(theta) < 1/pi; on S^2, Pr[sin(theta) < t] = 1 - sqrt(1 - t^2).
  RngStream rng(21);
  auto report = AuditR1smg(3, Budget(1.0, 0.5), 200'000, rng);
  ASSERT_TRUE(report.ok());
  const double exact = 1.0 - std::sqrt(1.0 - 1.0 / (std::numbers::pi * std::numbers::pi));
  EXPECT_NEAR(report->failure_rate, exact, 4.0 * std::sqrt(exact * (1 - exact) / 2e5));
  EXPECT_TRUE(report->pass);
  EXPECT_FALSE(report->zero_failure_mode);
  EXPECT_GE(report->wilson_upper_95, report->failure_rate);
  EXPECT_EQ(report->failure_rate,
            static_cast<double>(report->failures) / report->trials);
  EXPECT_NEAR(std::cos(report->theta0), std::sqrt(report->psi), 1e-15);
}

TEST(AuditR1smgTest, SmallDeltaUsesZeroFailureMode) {
  RngStream rng(22);
  auto report = AuditR1smg(50, Budget(1.0, 1e-7), 10'000, rng);
  ASSERT_TRUE(report.ok());
  EXPECT_TRUE(report->zero_failure_mode);
  EXPECT_FALSE(report->warnings.empty());
  EXPECT_EQ(report->pass, report->failures == 0);
}

TEST(AuditR1smgTest, Reproducible) {
  RngStream a(5), b(5);
  auto r1 = AuditR1smg(10, Budget(0.5, 0.3), 20'000, a);
  auto r2 = AuditR1smg(10, Budget(0.5, 0.3), 20'000, b, 2);
  EXPECT_EQ(r1->failures, r2->failures);
  EXPECT_EQ(r1->wilson_upper_95, r2->wilson_upper_95);
  EXPECT_FALSE(AuditR1smg(2, Budget(0.5, 0.3), 20'000, a).ok());
  EXPECT_FALSE(AuditR1smg(10, Budget(0.5, 0.3), 20, a).ok());
}

TEST(LossVsDimensionSweepTest, ShapesAndOrdering) {
  std::vector<int64_t> dims;
  for (int64_t m = 100; m <= 10'000'000'000LL; m *= 10) dims.push_back(m);
  auto rows = LossVsDimensionSweep(Budget(1.0, 1e-7), 1.0, dims);
  ASSERT_TRUE(rows.ok());
  ASSERT_EQ(rows->size(), dims.size());
  for (size_t i = 0; i < rows->size(); ++i) {
    EXPECT_FALSE((*rows)[i].classic.has_value());
    if (i > 0) {
      EXPECT_LT((*rows)[i].r1smg, (*rows)[i - 1].r1smg);
      EXPECT_GT((*rows)[i].analytic, (*rows)[i - 1].analytic);
    }
  }
  EXPECT_NEAR(rows->back().r1smg, 2.0, 0.02);

  auto with_classic = LossVsDimensionSweep(Budget(0.5, 1e-7), 1.0, dims);
  ASSERT_TRUE(with_classic.ok());
  for (size_t i = 0; i < with_classic->size(); ++i) {
    const auto& row = (*with_classic)[i];
    ASSERT_TRUE(row.classic.has_value());
    EXPECT_LT(row.analytic, *row.classic);
    if (i > 0) {
      EXPECT_NEAR(*row.classic / *(*with_classic)[i - 1].classic, 10.0, 1e-12);
    }
  }
  const std::vector<int64_t> bad = {3, 2};
  EXPECT_FALSE(LossVsDimensionSweep(Budget(0.5, 1e-7), 1.0, bad).ok());
}

TEST(OuterProductRankOneResidualTest, NoiseIsRankOne) {
  RngStream rng(9);
  for (int64_t m : {3, 50, 500}) {
    auto n = R1smgNoise(rng, m, 3.0);
    EXPECT_LT(OuterProductRankOneResidual(n->components), 1e-10);
  }
}

}  // namespace
}  // namespace r1smg
