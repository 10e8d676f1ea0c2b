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

#ifndef R1SMG_ANALYSIS_H_
#define R1SMG_ANALYSIS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "r1smg/mechanisms.h"
#include "r1smg/rng.h"
#include "r1smg/samplers.h"

namespace r1smg {

// Monte Carlo runs are split into fixed-size chunks; chunk k draws from
// rng.Substream(k). Results are therefore identical for any `jobs` value, and
// on return the caller's stream has been advanced past every chunk stream.
inline constexpr int64_t kMonteCarloChunk = 1 << 16;

// Raw moments of the accuracy loss L = ||n||^2 and the raw-moment ratios
// E[L^4]/E[L^2]^2 (kurtosis) and E[L^3]/E[L^2]^{3/2} (skewness).
struct LossMomentStats {
  int64_t n = 0;
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  double kurtosis = 0.0;
  double skewness = 0.0;
};

// Draws `trials` (>= 1000) independent noise vectors from `mech`.
absl::StatusOr<LossMomentStats> LossMoments(const CalibratedMechanism& mech,
                                            int64_t trials, RngStream& rng,
                                            int jobs = 1);

// Gaussian privacy loss |(||n||^2 - ||n + v||^2) / (2 sigma^2)|.
absl::StatusOr<double> PlrvGaussian(double sigma, const NoiseVector& noise,
                                    const NoiseVector& diff);

// The same loss through the projection lambda = <n, v/||v||>:
// (1/2sigma^2) | ||v||^2 + 2 lambda ||v|| |.
absl::StatusOr<double> PlrvGaussianProjected(double sigma,
                                             const NoiseVector& noise,
                                             const NoiseVector& diff);

// (rho1^2 - rho2^2) / (2 sigma*) with rho1 = g^T (s - fxp) and
// rho2 = h^T (s - fx).
absl::StatusOr<double> PlrvR1smg(double sigma_star, const NoiseVector& s,
                                 const NoiseVector& fx, const NoiseVector& fxp,
                                 const UnitVector& h, const UnitVector& g);

// An outcome s that both neighbouring R1SMG outputs can produce:
// s = fx + a h = fxp + b g, with ||fx - fxp|| <= delta2f.
struct OnSupportOutcome {
  NoiseVector s;
  NoiseVector fx;
  NoiseVector fxp;
  UnitVector h;
  UnitVector g;
  double theta;  // angle between h and g
};

// Draws h, g uniformly, a = sqrt(sigma*) z1, b = sqrt(sigma*) z2, and shrinks
// (a, b) when needed so ||a h - b g|| <= delta2f.
absl::StatusOr<OnSupportOutcome> SampleOnSupportOutcome(RngStream& rng,
                                                        int64_t m,
                                                        double sigma_star,
                                                        double delta2f);

// The three links of the R1SMG privacy-loss bound for one outcome:
// plrv <= (|rho1| + |rho2|)^2 / (2 sigma*) <= (2 delta2f / sin theta)^2 / (2 sigma*).
struct PlrvChain {
  double plrv;
  double projection_bound;
  double law_of_sines_bound;
};

absl::StatusOr<PlrvChain> EvaluatePlrvChain(double sigma_star,
                                            const OnSupportOutcome& outcome,
                                            double delta2f);

// sqrt(pi) Gamma(m/2) / Gamma((m-1)/2) cos(theta0)^{m-2}, clamped to <= 1.
absl::StatusOr<double> AngleTailBound(int64_t m, double theta0);

struct AngleTailEstimate {
  int64_t trials = 0;
  int64_t hits = 0;
  double empirical = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
};

// Fraction of independent uniform pairs on S^{m-1} with |theta - pi/2| >=
// theta0, next to the closed-form bound. Requires m >= 3, trials >= 1e4,
// theta0 in [0, pi/2].
absl::StatusOr<AngleTailEstimate> AngleTailProbability(int64_t m,
                                                       double theta0,
                                                       int64_t trials,
                                                       RngStream& rng,
                                                       int jobs = 1);

// Audit of the sufficient failure event in the R1SMG guarantee. A trial
// fails when sin^2(theta) < psi for an independent pair of directions,
// i.e. when the law-of-sines bound exceeds epsilon at sigma* = 2D^2/(e psi).
struct AuditReport {
  int64_t m = 0;
  int64_t trials = 0;
  double claimed_epsilon = 0.0;
  double claimed_delta = 0.0;
  double psi = 0.0;
  double theta0 = 0.0;
  int64_t failures = 0;
  double failure_rate = 0.0;
  double wilson_upper_95 = 0.0;
  // Set when delta * trials < 5; the verdict then requires zero failures.
  bool zero_failure_mode = false;
  bool pass = false;
  std::vector<std::string> warnings;
};

absl::StatusOr<AuditReport> AuditR1smg(int64_t m, const PrivacyBudget& budget,
                                       int64_t trials, RngStream& rng,
                                       int jobs = 1);

struct SweepRow {
  int64_t m;
  // Absent when epsilon >= 1 (outside the classic calibration's range).
  std::optional<double> classic;
  double analytic;
  double r1smg;
};

// Closed-form expected loss per mechanism for each dimension (all >= 3).
absl::StatusOr<std::vector<SweepRow>> LossVsDimensionSweep(
    const PrivacyBudget& budget, double delta2f, std::span<const int64_t> dims);

// ||n n^T - sigma1 u u^T||_F / sigma1 with sigma1 = ||n||^2, u = n/||n||.
// An upper bound on the ratio of the second to the first singular value of
// the outer product n n^T.
double OuterProductRankOneResidual(std::span<const double> n);

}  // namespace r1smg

#endif  // R1SMG_ANALYSIS_H_
