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

#ifndef R1SMG_MECHANISMS_H_
#define R1SMG_MECHANISMS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "r1smg/rng.h"

namespace r1smg {

// An (epsilon, delta) pair with epsilon > 0 and 0 < delta < 1.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

 private:
  PrivacyBudget(double epsilon, double delta)
      : epsilon_(epsilon), delta_(delta) {}
  double epsilon_;
  double delta_;
};

// Output shape of a query: a length-`rows` vector when `cols` == 1 and
// `is_matrix` is false, otherwise a rows x cols matrix stored row-major.
struct QueryShape {
  int64_t rows = 1;
  int64_t cols = 1;
  bool is_matrix = false;

  static QueryShape Vector(int64_t m) { return {m, 1, false}; }
  static QueryShape Matrix(int64_t m, int64_t n) { return {m, n, true}; }

  int64_t size() const { return rows * cols; }
  friend bool operator==(const QueryShape&, const QueryShape&) = default;
};

struct QueryProfile {
  QueryShape shape;
  // Delta_2 f, in query-output units. Supplied by the caller.
  double l2_sensitivity = 1.0;
  // gamma = sup_x ||f(x)||_F; only the MVG calibration uses it.
  std::optional<double> frobenius_sup;
};

struct ClassicGaussian {
  double sigma;
  QueryShape shape;
};

struct AnalyticGaussian {
  double sigma_a;
  QueryShape shape;
};

// Rank-1 singular multivariate Gaussian. Matrix queries are flattened, so
// `dim_m` is rows * cols of `shape`.
struct R1smg {
  double sigma_star;
  int64_t dim_m;
  QueryShape shape;
};

// Matrix-variate Gaussian with isotropic row covariance row_scale * I_M and
// column covariance col_scale * I_N.
struct Mvg {
  double row_scale;
  double col_scale;
  int64_t rows;
  int64_t cols;
};

using CalibratedMechanism =
    std::variant<ClassicGaussian, AnalyticGaussian, R1smg, Mvg>;

std::string MechanismName(const CalibratedMechanism& mech);

// ---------------------------------------------------------------------------
// R1SMG calibration.

// ln psi, where psi = (delta Gamma((m-1)/2) / (sqrt(pi) Gamma(m/2)))^(2/(m-2)).
// Computed entirely in log space through LogGammaRatio. Requires m >= 3.
absl::StatusOr<double> LogPsiFactor(int64_t m, double delta);

// psi in (0, 1). Independent of epsilon.
absl::StatusOr<double> PsiFactor(int64_t m, const PrivacyBudget& budget);

// sigma* = 2 Delta^2 / (epsilon psi), the boundary of the sufficient
// condition. Fails for fewer than three (flattened) entries.
absl::StatusOr<CalibratedMechanism> CalibrateR1smg(const QueryProfile& profile,
                                                   const PrivacyBudget& budget);

// ---------------------------------------------------------------------------
// Gaussian baselines.

// sigma = sqrt(2 ln(1.25/delta)) Delta / epsilon. Only valid for epsilon < 1.
absl::StatusOr<CalibratedMechanism> CalibrateClassicGaussian(
    const QueryProfile& profile, const PrivacyBudget& budget);

// Left-hand side of the analytic Gaussian condition:
// Phi(D/2s - e s/D) - exp(e) Phi(-D/2s - e s/D).
double AnalyticGaussianDelta(double epsilon, double l2_sensitivity,
                             double sigma);

// Smallest sigma whose AnalyticGaussianDelta is <= delta, found by bisection
// to floating-point resolution. The returned sigma satisfies
// AnalyticGaussianDelta(sigma) - delta in [-1e-12, 0].
absl::StatusOr<CalibratedMechanism> CalibrateAnalyticGaussian(
    const QueryProfile& profile, const PrivacyBudget& budget);

// ---------------------------------------------------------------------------
// MVG.

// H_r = sum_{i<=r} 1/i.
double HarmonicNumber(int64_t r);
// H_{r,1/2} = sum_{i<=r} 1/sqrt(i).
double HarmonicNumberHalf(int64_t r);
// tau(delta) = 2 sqrt(-MN ln delta) - 2 ln delta + MN.
double MvgTau(int64_t mn, double delta);

struct MvgBound {
  double alpha;
  double beta;
  double tau;
  // Upper limit on ||sigma(Sigma^-1)||_2 ||sigma(Psi^-1)||_2.
  double rhs;
};

// Evaluates the MVG sufficient condition with r = min(rows, cols).
absl::StatusOr<MvgBound> ComputeMvgBound(int64_t rows, int64_t cols,
                                         double l2_sensitivity,
                                         double frobenius_sup,
                                         const PrivacyBudget& budget);

// Isotropic Sigma = s I_M, Psi = s' I_N with sqrt(M)/s = split * sqrt(N)/s'
// and (sqrt(M)/s)(sqrt(N)/s') equal to the bound. `split` = 1 is the
// symmetric allocation.
absl::StatusOr<CalibratedMechanism> CalibrateMvgIsotropic(
    const QueryProfile& profile, const PrivacyBudget& budget,
    double split = 1.0);

// ---------------------------------------------------------------------------
// Use.

// Returns values + one noise draw. `values` is row-major for matrices and is
// never modified. The shape must match the calibrated one.
absl::StatusOr<std::vector<double>> Perturb(const CalibratedMechanism& mech,
                                            std::span<const double> values,
                                            const QueryShape& shape,
                                            RngStream& rng);

// Writes one noise draw of the mechanism into `out` (size = flattened query
// size). Unchecked; used by the Monte Carlo engine.
void DrawNoise(const CalibratedMechanism& mech, RngStream& rng,
               std::span<double> out);

int64_t NoiseDimension(const CalibratedMechanism& mech);

// E||n||^2: sigma^2 M, sigma_A^2 M, sigma*, or s s' M N.
double ExpectedAccuracyLoss(const CalibratedMechanism& mech);

}  // namespace r1smg

#endif  // R1SMG_MECHANISMS_H_
