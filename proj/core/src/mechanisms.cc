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

#include "r1smg/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "r1smg/numkernel.h"
#include "r1smg/samplers.h"

namespace r1smg {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

absl::Status ValidateProfile(const QueryProfile& profile) {
  if (profile.shape.rows < 1 || profile.shape.cols < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("query shape must be positive, got %dx%d",
                        profile.shape.rows, profile.shape.cols));
  }
  if (!std::isfinite(profile.l2_sensitivity) || profile.l2_sensitivity <= 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "l2 sensitivity must be positive and finite, got %g",
        profile.l2_sensitivity));
  }
  if (profile.frobenius_sup.has_value() &&
      !(std::isfinite(*profile.frobenius_sup) && *profile.frobenius_sup >= 0)) {
    return absl::InvalidArgumentError("frobenius_sup must be >= 0 and finite");
  }
  return absl::OkStatus();
}

constexpr double kAnalyticInitialLow = 1e-6;
constexpr double kAnalyticInitialHigh = 1e6;
constexpr int kAnalyticMaxWidenings = 5;
constexpr double kAnalyticSlack = 1e-12;

}  // namespace

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be > 0 and finite, got %g", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  return PrivacyBudget(epsilon, delta);
}

std::string MechanismName(const CalibratedMechanism& mech) {
  return std::visit(Overloaded{
                        [](const ClassicGaussian&) { return "classic"; },
                        [](const AnalyticGaussian&) { return "analytic"; },
                        [](const R1smg&) { return "r1smg"; },
                        [](const Mvg&) { return "mvg"; },
                    },
                    mech);
}

absl::StatusOr<double> LogPsiFactor(int64_t m, double delta) {
  if (m <= 2) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dimension too small for R1SMG: need M >= 3, got %d", m));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  const double md = static_cast<double>(m);
  // ln Gamma(m/2) - ln Gamma((m-1)/2)
  absl::StatusOr<double> gamma_ratio = LogGammaRatio((md - 1.0) / 2.0, 0.5);
  if (!gamma_ratio.ok()) return gamma_ratio.status();
  const double log_base =
      std::log(delta) - 0.5 * std::log(std::numbers::pi) - *gamma_ratio;
  return 2.0 / (md - 2.0) * log_base;
}

absl::StatusOr<double> PsiFactor(int64_t m, const PrivacyBudget& budget) {
  absl::StatusOr<double> log_psi = LogPsiFactor(m, budget.delta());
  if (!log_psi.ok()) return log_psi.status();
  return std::exp(*log_psi);
}

absl::StatusOr<CalibratedMechanism> CalibrateR1smg(const QueryProfile& profile,
                                                   const PrivacyBudget& budget) {
  if (auto s = ValidateProfile(profile); !s.ok()) return s;
  const int64_t m = profile.shape.size();
  absl::StatusOr<double> log_psi = LogPsiFactor(m, budget.delta());
  if (!log_psi.ok()) return log_psi.status();
  const double delta2f = profile.l2_sensitivity;
  const double sigma_star =
      2.0 * delta2f * delta2f / budget.epsilon() * std::exp(-*log_psi);
  if (!std::isfinite(sigma_star)) {
    return absl::InternalError("R1SMG noise scale overflowed");
  }
  return R1smg{sigma_star, m, profile.shape};
}

absl::StatusOr<CalibratedMechanism> CalibrateClassicGaussian(
    const QueryProfile& profile, const PrivacyBudget& budget) {
  if (auto s = ValidateProfile(profile); !s.ok()) return s;
  if (budget.epsilon() >= 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "classic Gaussian calibration holds only for epsilon in (0, 1); got "
        "epsilon=%g",
        budget.epsilon()));
  }
  const double c = std::sqrt(2.0 * std::log(1.25 / budget.delta()));
  return ClassicGaussian{c * profile.l2_sensitivity / budget.epsilon(),
                         profile.shape};
}

double AnalyticGaussianDelta(double epsilon, double l2_sensitivity,
                             double sigma) {
  const double a = l2_sensitivity / (2.0 * sigma);
  const double b = epsilon * sigma / l2_sensitivity;
  return StdNormalCdf(a - b) - std::exp(epsilon) * StdNormalCdf(-a - b);
}

absl::StatusOr<CalibratedMechanism> CalibrateAnalyticGaussian(
    const QueryProfile& profile, const PrivacyBudget& budget) {
  if (auto s = ValidateProfile(profile); !s.ok()) return s;
  const double eps = budget.epsilon();
  const double delta = budget.delta();
  const double sens = profile.l2_sensitivity;
  auto excess = [&](double sigma) {
    return AnalyticGaussianDelta(eps, sens, sigma) - delta;
  };

  double lo = sens * kAnalyticInitialLow;
  double hi = sens * kAnalyticInitialHigh;
  for (int i = 0; i < kAnalyticMaxWidenings && excess(lo) <= 0.0; ++i) {
    lo /= 10.0;
  }
  for (int i = 0; i < kAnalyticMaxWidenings && excess(hi) > 0.0; ++i) {
    hi *= 10.0;
  }
  absl::StatusOr<BisectionResult> r = Bisect(excess, {lo, hi, 0.0});
  if (!r.ok()) {
    return absl::InternalError(absl::StrFormat(
        "analytic Gaussian calibration failed: %s", r.status().message()));
  }
  // The upper end of the final interval is the smallest representable sigma
  // found that satisfies the condition.
  const double sigma_a = r->hi;
  const double g = r->f_hi;
  if (!(g <= 0.0 && g >= -kAnalyticSlack)) {
    return absl::InternalError(absl::StrFormat(
        "analytic Gaussian calibration residual %g outside [-1e-12, 0]", g));
  }
  return AnalyticGaussian{sigma_a, profile.shape};
}

double HarmonicNumber(int64_t r) {
  double sum = 0.0;
  for (int64_t i = r; i >= 1; --i) sum += 1.0 / static_cast<double>(i);
  return sum;
}

double HarmonicNumberHalf(int64_t r) {
  double sum = 0.0;
  for (int64_t i = r; i >= 1; --i) sum += 1.0 / std::sqrt(static_cast<double>(i));
  return sum;
}

double MvgTau(int64_t mn, double delta) {
  const double size = static_cast<double>(mn);
  const double log_delta = std::log(delta);
  return 2.0 * std::sqrt(-size * log_delta) - 2.0 * log_delta + size;
}

absl::StatusOr<MvgBound> ComputeMvgBound(int64_t rows, int64_t cols,
                                         double l2_sensitivity,
                                         double frobenius_sup,
                                         const PrivacyBudget& budget) {
  if (rows < 1 || cols < 1) {
    return absl::InvalidArgumentError("MVG needs a matrix shape with M, N >= 1");
  }
  const int64_t r = std::min(rows, cols);
  const double h = HarmonicNumber(r);
  const double h_half = HarmonicNumberHalf(r);
  MvgBound bound;
  bound.tau = MvgTau(rows * cols, budget.delta());
  bound.alpha = 2.0 * h * frobenius_sup * l2_sensitivity +
                (h + h_half) * frobenius_sup * frobenius_sup;
  bound.beta = 2.0 * std::pow(static_cast<double>(rows * cols), 0.25) * h *
               l2_sensitivity * bound.tau;
  // (-b + sqrt(b^2 + 8 a e))^2 / (4 a^2) rewritten as
  // 16 e^2 / (b + sqrt(b^2 + 8 a e))^2, which is stable as a -> 0.
  const double root =
      std::sqrt(bound.beta * bound.beta + 8.0 * bound.alpha * budget.epsilon());
  const double denom = bound.beta + root;
  bound.rhs = 16.0 * budget.epsilon() * budget.epsilon() / (denom * denom);
  if (!(bound.rhs > 0.0) || !std::isfinite(bound.rhs)) {
    return absl::InternalError(
        absl::StrFormat("MVG bound is not positive: %g", bound.rhs));
  }
  return bound;
}

absl::StatusOr<CalibratedMechanism> CalibrateMvgIsotropic(
    const QueryProfile& profile, const PrivacyBudget& budget, double split) {
  if (auto s = ValidateProfile(profile); !s.ok()) return s;
  if (!profile.frobenius_sup.has_value()) {
    return absl::InvalidArgumentError(
        "MVG calibration requires frobenius_sup (gamma)");
  }
  if (!(split > 0.0) || !std::isfinite(split)) {
    return absl::InvalidArgumentError("MVG split must be positive");
  }
  const int64_t rows = profile.shape.rows;
  const int64_t cols = profile.shape.cols;
  absl::StatusOr<MvgBound> bound =
      ComputeMvgBound(rows, cols, profile.l2_sensitivity,
                      *profile.frobenius_sup, budget);
  if (!bound.ok()) return bound.status();
  // row_norm = sqrt(M)/s, col_norm = sqrt(N)/s', row_norm = split * col_norm,
  // row_norm * col_norm = rhs.
  const double col_norm = std::sqrt(bound->rhs / split);
  const double row_norm = split * col_norm;
  return Mvg{std::sqrt(static_cast<double>(rows)) / row_norm,
             std::sqrt(static_cast<double>(cols)) / col_norm, rows, cols};
}

int64_t NoiseDimension(const CalibratedMechanism& mech) {
  return std::visit(
      Overloaded{
          [](const ClassicGaussian& g) { return g.shape.size(); },
          [](const AnalyticGaussian& g) { return g.shape.size(); },
          [](const R1smg& r) { return r.dim_m; },
          [](const Mvg& v) { return v.rows * v.cols; },
      },
      mech);
}

void DrawNoise(const CalibratedMechanism& mech, RngStream& rng,
               std::span<double> out) {
  std::visit(Overloaded{
                 [&](const ClassicGaussian& g) {
                   kernels::FillGaussian(rng, g.sigma, out);
                 },
                 [&](const AnalyticGaussian& g) {
                   kernels::FillGaussian(rng, g.sigma_a, out);
                 },
                 [&](const R1smg& r) {
                   kernels::FillR1smgNoise(rng, r.sigma_star, out);
                 },
                 [&](const Mvg& v) {
                   // Sigma^{1/2} Z Psi^{1/2} with isotropic factors.
                   kernels::FillGaussian(
                       rng, std::sqrt(v.row_scale * v.col_scale), out);
                 },
             },
             mech);
}

absl::StatusOr<std::vector<double>> Perturb(const CalibratedMechanism& mech,
                                            std::span<const double> values,
                                            const QueryShape& shape,
                                            RngStream& rng) {
  const bool shape_ok = std::visit(
      Overloaded{
          [&](const ClassicGaussian& g) { return g.shape == shape; },
          [&](const AnalyticGaussian& g) { return g.shape == shape; },
          [&](const R1smg& r) { return shape.size() == r.dim_m; },
          [&](const Mvg& v) {
            return shape.rows == v.rows && shape.cols == v.cols;
          },
      },
      mech);
  if (!shape_ok || static_cast<int64_t>(values.size()) != shape.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "shape mismatch: %s calibrated for %d entries, got %dx%d with %d "
        "values",
        MechanismName(mech), NoiseDimension(mech), shape.rows, shape.cols,
        values.size()));
  }
  std::vector<double> out(values.size());
  DrawNoise(mech, rng, out);
  for (size_t i = 0; i < out.size(); ++i) out[i] += values[i];
  return out;
}

double ExpectedAccuracyLoss(const CalibratedMechanism& mech) {
  return std::visit(
      Overloaded{
          [](const ClassicGaussian& g) {
            return g.sigma * g.sigma * static_cast<double>(g.shape.size());
          },
          [](const AnalyticGaussian& g) {
            return g.sigma_a * g.sigma_a * static_cast<double>(g.shape.size());
          },
          [](const R1smg& r) { return r.sigma_star; },
          [](const Mvg& v) {
            return v.row_scale * v.col_scale *
                   static_cast<double>(v.rows * v.cols);
          },
      },
      mech);
}

}  // namespace r1smg
