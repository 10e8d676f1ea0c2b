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

#include "r1smg/samplers.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace r1smg {
namespace {

double SquaredNorm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

absl::Status CheckScale(double value, const char* name, bool allow_zero) {
  if (!std::isfinite(value) || value < 0.0 || (!allow_zero && value == 0.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s must be %s and finite, got %g", name,
        allow_zero ? "nonnegative" : "positive", value));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<UnitVector> UnitVector::Normalize(std::span<const double> x) {
  if (x.size() < 2) {
    return absl::InvalidArgumentError("unit vectors need dimension >= 2");
  }
  const double norm = std::sqrt(SquaredNorm(x));
  if (!std::isfinite(norm)) {
    return absl::InvalidArgumentError("cannot normalize a non-finite vector");
  }
  if (norm < kMinNormBeforeNormalize) {
    return absl::InvalidArgumentError(
        absl::StrFormat("norm %g too small to normalize", norm));
  }
  std::vector<double> c(x.begin(), x.end());
  for (double& v : c) v /= norm;
  return UnitVector(std::move(c));
}

namespace kernels {

void FillGaussian(RngStream& rng, double sigma, std::span<double> out) {
  for (double& v : out) v = sigma * rng.Normal();
}

void FillUniformUnit(RngStream& rng, std::span<double> out) {
  double norm = 0.0;
  do {
    FillGaussian(rng, 1.0, out);
    norm = std::sqrt(SquaredNorm(out));
  } while (!(norm >= kMinNormBeforeNormalize));
  const double inv = 1.0 / norm;
  for (double& v : out) v *= inv;
}

double FillR1smgNoise(RngStream& rng, double sigma_star,
                      std::span<double> out) {
  FillUniformUnit(rng, out);
  const double z = rng.Normal();
  const double scale = std::sqrt(sigma_star) * z;
  for (double& v : out) v *= scale;
  return z;
}

void FillChiRadialGaussian(RngStream& rng, double sigma,
                           std::span<double> out) {
  double chi_squared = 0.0;
  for (size_t i = 0; i < out.size(); ++i) {
    const double z = rng.Normal();
    chi_squared += z * z;
  }
  FillUniformUnit(rng, out);
  const double scale = sigma * std::sqrt(chi_squared);
  for (double& v : out) v *= scale;
}

}  // namespace kernels

absl::StatusOr<NoiseVector> GaussianVector(RngStream& rng, int64_t m,
                                           double sigma) {
  if (m < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("dimension must be >= 1, got %d", m));
  }
  if (auto s = CheckScale(sigma, "sigma", /*allow_zero=*/true); !s.ok()) {
    return s;
  }
  NoiseVector n{std::vector<double>(m, 0.0)};
  if (sigma > 0.0) kernels::FillGaussian(rng, sigma, n.components);
  return n;
}

absl::StatusOr<UnitVector> UniformUnitVector(RngStream& rng, int64_t m) {
  if (m < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("uniform unit vectors need dimension >= 2, got %d", m));
  }
  std::vector<double> x(m);
  kernels::FillUniformUnit(rng, x);
  return UnitVector::Normalize(x);
}

absl::StatusOr<NoiseVector> R1smgNoise(RngStream& rng, int64_t m,
                                       double sigma_star) {
  if (m <= 2) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dimension too small for R1SMG: need M >= 3, got %d", m));
  }
  if (auto s = CheckScale(sigma_star, "sigma_star", /*allow_zero=*/false);
      !s.ok()) {
    return s;
  }
  NoiseVector n{std::vector<double>(m)};
  kernels::FillR1smgNoise(rng, sigma_star, n.components);
  return n;
}

absl::StatusOr<NoiseVector> ChiRadialGaussian(RngStream& rng, int64_t m,
                                              double sigma) {
  if (m < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("dimension must be >= 2, got %d", m));
  }
  if (auto s = CheckScale(sigma, "sigma", /*allow_zero=*/false); !s.ok()) {
    return s;
  }
  NoiseVector n{std::vector<double>(m)};
  kernels::FillChiRadialGaussian(rng, sigma, n.components);
  return n;
}

}  // namespace r1smg
