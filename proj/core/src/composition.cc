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

#include "r1smg/composition.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "r1smg/numkernel.h"

namespace r1smg {
namespace {

absl::Status ValidateSchedule(const CompositionSchedule& s) {
  if (!(s.epochs > 0.0) || !std::isfinite(s.epochs)) {
    return absl::InvalidArgumentError("epochs must be positive");
  }
  if (!(s.sampling_ratio > 0.0 && s.sampling_ratio <= 1.0)) {
    return absl::InvalidArgumentError("sampling ratio must lie in (0, 1]");
  }
  if (!(s.delta_prime > 0.0 && s.delta_prime < 1.0)) {
    return absl::InvalidArgumentError("delta' must lie in (0, 1)");
  }
  if (s.steps() < 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "schedule has %g < 1 steps (epochs / sampling ratio)", s.steps()));
  }
  return absl::OkStatus();
}

double ForwardEpsilon(const CompositionSchedule& s, double eps0) {
  const double steps = s.steps();
  const double amplified = s.sampling_ratio * eps0;
  return std::sqrt(2.0 * steps * std::log(1.0 / s.delta_prime)) * amplified +
         steps * amplified * std::expm1(amplified);
}

constexpr double kEps0Floor = 1e-12;
constexpr int kMaxUpperExpansions = 200;

}  // namespace

absl::StatusOr<EpsilonDelta> TotalFromPerStep(
    const CompositionSchedule& schedule, double eps0, double delta0) {
  if (auto s = ValidateSchedule(schedule); !s.ok()) return s;
  if (!(eps0 > 0.0) || !(delta0 >= 0.0 && delta0 < 1.0)) {
    return absl::InvalidArgumentError(
        "per-step budget needs eps0 > 0 and delta0 in [0, 1)");
  }
  return EpsilonDelta{
      ForwardEpsilon(schedule, eps0),
      schedule.steps() * (schedule.sampling_ratio * delta0) +
          schedule.delta_prime};
}

absl::StatusOr<EpsilonDelta> PerStepFromTotal(const CompositionPlan& plan) {
  const CompositionSchedule& s = plan.schedule;
  if (auto st = ValidateSchedule(s); !st.ok()) return st;
  if (!(plan.total_epsilon > 0.0) || !std::isfinite(plan.total_epsilon)) {
    return absl::InvalidArgumentError("total epsilon must be positive");
  }
  if (!(plan.total_delta > 0.0 && plan.total_delta < 1.0)) {
    return absl::InvalidArgumentError("total delta must lie in (0, 1)");
  }
  if (s.delta_prime >= plan.total_delta) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "delta' (%g) must be smaller than the total delta (%g)", s.delta_prime,
        plan.total_delta));
  }
  const double delta0 =
      (plan.total_delta - s.delta_prime) / (s.steps() * s.sampling_ratio);

  auto excess = [&](double eps0) {
    return ForwardEpsilon(s, eps0) - plan.total_epsilon;
  };
  const double lo = kEps0Floor;
  if (excess(lo) >= 0.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "total epsilon %g is below what any eps0 >= %g yields",
        plan.total_epsilon, kEps0Floor));
  }
  double hi = plan.total_epsilon / s.sampling_ratio;
  for (int i = 0; excess(hi) < 0.0; ++i) {
    if (i == kMaxUpperExpansions) {
      return absl::InvalidArgumentError("could not bracket eps0");
    }
    hi *= 2.0;
  }
  absl::StatusOr<double> eps0 = FindRootMonotone(excess, {lo, hi, 0.0});
  if (!eps0.ok()) return eps0.status();
  return EpsilonDelta{*eps0, delta0};
}

}  // namespace r1smg
