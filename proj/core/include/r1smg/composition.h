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

#ifndef R1SMG_COMPOSITION_H_
#define R1SMG_COMPOSITION_H_

#include "absl/status/statusor.h"

namespace r1smg {

// T = epochs / sampling_ratio invocations of a mechanism on Poisson-style
// subsamples with ratio q, composed with slack delta'.
struct CompositionSchedule {
  double epochs = 1.0;
  double sampling_ratio = 1.0;
  double delta_prime = 1e-10;

  double steps() const { return epochs / sampling_ratio; }
};

struct CompositionPlan {
  CompositionSchedule schedule;
  double total_epsilon = 1.0;
  double total_delta = 1e-5;
};

struct EpsilonDelta {
  double epsilon;
  double delta;
};

// Strong composition with amplification by sampling:
//   eps   = sqrt(2 T ln(1/delta')) (q eps0) + T (q eps0)(exp(q eps0) - 1)
//   delta = T (q delta0) + delta'
absl::StatusOr<EpsilonDelta> TotalFromPerStep(
    const CompositionSchedule& schedule, double eps0, double delta0);

// Inverts TotalFromPerStep: delta0 in closed form, eps0 by bisection to
// floating-point resolution (the forward map is increasing in eps0).
absl::StatusOr<EpsilonDelta> PerStepFromTotal(const CompositionPlan& plan);

}  // namespace r1smg

#endif  // R1SMG_COMPOSITION_H_
