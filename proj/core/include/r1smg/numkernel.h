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

#ifndef R1SMG_NUMKERNEL_H_
#define R1SMG_NUMKERNEL_H_

#include <functional>

#include "absl/status/statusor.h"

namespace r1smg {

// Natural log of the Gamma function for x > 0. Returns InvalidArgument for
// x <= 0 or non-finite x.
absl::StatusOr<double> LogGamma(double x);

// ln Gamma(x + a) - ln Gamma(x), evaluated without forming the two (possibly
// enormous) log-Gamma values when x is large. Requires x > 0 and x + a > 0.
//
// For x >= 20 the difference of the Stirling series is taken term by term,
// with the leading terms combined through log1p, so the result keeps full
// relative precision even when ln Gamma(x) is ~1e11 and the difference is ~10.
absl::StatusOr<double> LogGammaRatio(double x, double a);

// Standard normal CDF. Saturates to exactly 0 or 1 in the far tails.
double StdNormalCdf(double t);

// A search interval for a monotone (or single sign change) objective.
// `tolerance` is an absolute width on the argument; zero means "bisect until
// the interval cannot be split in floating point".
struct BracketedRoot {
  double lo = 0.0;
  double hi = 0.0;
  double tolerance = 0.0;
};

// Final state of a bisection: the narrowed interval and the objective values
// at its ends, which always have opposite signs (or one of them is zero).
struct BisectionResult {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
  int iterations = 0;
};

inline constexpr int kMaxBisectionIterations = 2000;

// Bisects `objective` on `bracket` until the interval width drops to the
// bracket tolerance or to floating-point resolution.
//
// Errors: InvalidArgument if the bracket is malformed or the objective does
// not change sign on it; Internal if the iteration budget is exhausted.
absl::StatusOr<BisectionResult> Bisect(
    const std::function<double(double)>& objective,
    const BracketedRoot& bracket);

// Convenience wrapper around Bisect returning the end of the final interval
// with the smaller |objective|.
absl::StatusOr<double> FindRootMonotone(
    const std::function<double(double)>& objective,
    const BracketedRoot& bracket);

}  // namespace r1smg

#endif  // R1SMG_NUMKERNEL_H_
