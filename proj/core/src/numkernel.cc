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

#include "r1smg/numkernel.h"

#include <math.h>

#include <array>
#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace r1smg {
namespace {

// Bernoulli coefficients B_{2k} / (2k (2k - 1)) of the Stirling series.
constexpr std::array<double, 8> kStirlingCoefficients = {
    1.0 / 12.0,           -1.0 / 360.0,         1.0 / 1260.0,
    -1.0 / 1680.0,        1.0 / 1188.0,         -691.0 / 360360.0,
    1.0 / 156.0,          -3617.0 / 122400.0,
};

constexpr double kStirlingThreshold = 20.0;

// Sum_k c_k / x^(2k-1).
double StirlingTail(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double power = inv;
  double sum = 0.0;
  for (double c : kStirlingCoefficients) {
    sum += c * power;
    power *= inv2;
  }
  return sum;
}

}  // namespace

absl::StatusOr<double> LogGamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("LogGamma requires finite x > 0, got %g", x));
  }
  // lgamma_r is the reentrant libm routine; std::lgamma writes signgam.
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

absl::StatusOr<double> LogGammaRatio(double x, double a) {
  if (!std::isfinite(x) || !std::isfinite(a) || x <= 0.0 || x + a <= 0.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "LogGammaRatio requires x > 0 and x + a > 0, got x=%g a=%g", x, a));
  }
  if (a == 0.0) return 0.0;
  if (x < kStirlingThreshold || x + a < kStirlingThreshold) {
    int sign = 0;
    return ::lgamma_r(x + a, &sign) - ::lgamma_r(x, &sign);
  }
  // (x+a-1/2) ln(x+a) - (x-1/2) ln x - a
  //   = (x-1/2) log1p(a/x) + a ln(x+a) - a
  const double leading =
      (x - 0.5) * std::log1p(a / x) + a * std::log(x + a) - a;
  return leading + (StirlingTail(x + a) - StirlingTail(x));
}

double StdNormalCdf(double t) {
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

absl::StatusOr<BisectionResult> Bisect(
    const std::function<double(double)>& objective,
    const BracketedRoot& bracket) {
  if (!(bracket.lo < bracket.hi) || !std::isfinite(bracket.lo) ||
      !std::isfinite(bracket.hi) || !(bracket.tolerance >= 0.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "malformed bracket [%g, %g] tol=%g", bracket.lo, bracket.hi,
        bracket.tolerance));
  }
  BisectionResult r{bracket.lo, bracket.hi, objective(bracket.lo),
                    objective(bracket.hi), 0};
  if (std::isnan(r.f_lo) || std::isnan(r.f_hi)) {
    return absl::InvalidArgumentError("objective is NaN at a bracket end");
  }
  if (r.f_lo == 0.0) {
    r.hi = r.lo;
    r.f_hi = r.f_lo;
    return r;
  }
  if (r.f_hi == 0.0) {
    r.lo = r.hi;
    r.f_lo = r.f_hi;
    return r;
  }
  if (std::signbit(r.f_lo) == std::signbit(r.f_hi)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "objective does not change sign on [%g, %g] (f=%g, %g)", r.lo, r.hi,
        r.f_lo, r.f_hi));
  }
  while (r.hi - r.lo > bracket.tolerance) {
    if (r.iterations >= kMaxBisectionIterations) {
      return absl::InternalError(absl::StrFormat(
          "bisection did not converge after %d iterations", r.iterations));
    }
    const double mid = r.lo + 0.5 * (r.hi - r.lo);
    if (mid <= r.lo || mid >= r.hi) break;  // floating-point resolution
    const double f_mid = objective(mid);
    ++r.iterations;
    if (std::isnan(f_mid)) {
      return absl::InternalError(
          absl::StrFormat("objective is NaN at %.17g", mid));
    }
    if (f_mid == 0.0) {
      r.lo = r.hi = mid;
      r.f_lo = r.f_hi = 0.0;
      break;
    }
    if (std::signbit(f_mid) == std::signbit(r.f_lo)) {
      r.lo = mid;
      r.f_lo = f_mid;
    } else {
      r.hi = mid;
      r.f_hi = f_mid;
    }
  }
  return r;
}

absl::StatusOr<double> FindRootMonotone(
    const std::function<double(double)>& objective,
    const BracketedRoot& bracket) {
  absl::StatusOr<BisectionResult> r = Bisect(objective, bracket);
  if (!r.ok()) return r.status();
  return std::abs(r->f_lo) <= std::abs(r->f_hi) ? r->lo : r->hi;
}

}  // namespace r1smg
