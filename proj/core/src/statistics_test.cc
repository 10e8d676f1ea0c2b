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

#include "r1smg/statistics.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace r1smg {
namespace {

TEST(CompensatedSumTest, RecoversCancelledTerms) {
  CompensatedSum sum;
  sum.Add(1e16);
  for (int i = 0; i < 1000; ++i) sum.Add(1.0);
  sum.Add(-1e16);
  EXPECT_EQ(sum.Total(), 1000.0);

  CompensatedSum a, b;
  for (int i = 0; i < 10; ++i) a.Add(0.1);
  for (int i = 0; i < 10; ++i) b.Add(0.1);
  a.Merge(b);
  EXPECT_NEAR(a.Total(), 2.0, 1e-15);
}

TEST(WilsonIntervalTest, ClosedForms) {
  // Zero successes: upper = z^2 / (n + z^2).
  const ProportionInterval zero = WilsonInterval(0, 10);
  EXPECT_EQ(zero.lower, 0.0);
  EXPECT_NEAR(zero.upper, kZ95 * kZ95 / (10.0 + kZ95 * kZ95), 1e-12);
  // Half: symmetric around 1/2 with half-width z sqrt(n/4 + z^2/4)/(n + z^2).
  const ProportionInterval half = WilsonInterval(50, 100);
  const double hw = kZ95 * std::sqrt(25.0 + kZ95 * kZ95 / 4.0) / (100.0 + kZ95 * kZ95);
  EXPECT_NEAR(half.lower, 0.5 - hw, 1e-12);
  EXPECT_NEAR(half.upper, 0.5 + hw, 1e-12);
  const ProportionInterval some = WilsonInterval(52'000, 1'000'000);
  EXPECT_GT(some.upper, 0.052);
  EXPECT_LT(some.lower, 0.052);
}

TEST(BinomialStandardErrorTest, Basic) {
  EXPECT_DOUBLE_EQ(BinomialStandardError(25, 100), std::sqrt(0.25 * 0.75 / 100));
  EXPECT_EQ(BinomialStandardError(0, 100), 0.0);
}

TEST(KsTest, TwoSampleExtremes) {
  const std::vector<double> a = {1, 2, 3, 4};
  EXPECT_EQ(KsTwoSampleStatistic(a, a), 0.0);
  EXPECT_EQ(KsTwoSampleStatistic(a, {10, 11, 12}), 1.0);
  EXPECT_DOUBLE_EQ(KsTwoSampleStatistic({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5);
}

TEST(KsTest, OneSampleUniformGrid) {
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100.0);
  const double d = KsOneSampleStatistic(grid, [](double x) { return x; });
  EXPECT_NEAR(d, 0.005, 1e-12);
}

TEST(KsTest, CriticalValue) {
  // c(0.01) = 1.6276.
  EXPECT_NEAR(KsTwoSampleCriticalValue(100'000, 100'000, 0.01),
              1.62762 * std::sqrt(2.0 / 100'000), 1e-6);
}

}  // namespace
}  // namespace r1smg
