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

#ifndef R1SMG_STATISTICS_H_
#define R1SMG_STATISTICS_H_

#include <cstdint>
#include <functional>
#include <vector>

namespace r1smg {

// Neumaier's compensated sum.
class CompensatedSum {
 public:
  void Add(double x);
  void Merge(const CompensatedSum& other);
  double Total() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

struct ProportionInterval {
  double lower;
  double upper;
};

// Wilson score interval for `successes` out of `trials` (trials >= 1).
ProportionInterval WilsonInterval(int64_t successes, int64_t trials,
                                  double z = kZ95);

// sqrt(p (1 - p) / n) at the empirical p.
double BinomialStandardError(int64_t successes, int64_t trials);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double KsTwoSampleStatistic(std::vector<double> a, std::vector<double> b);

// One-sample statistic against a continuous CDF.
double KsOneSampleStatistic(std::vector<double> samples,
                            const std::function<double(double)>& cdf);

// Large-sample two-sample critical value c(alpha) sqrt((n + m) / (n m)) with
// c(alpha) = sqrt(-ln(alpha / 2) / 2).
double KsTwoSampleCriticalValue(int64_t n, int64_t m, double alpha);

}  // namespace r1smg

#endif  // R1SMG_STATISTICS_H_
