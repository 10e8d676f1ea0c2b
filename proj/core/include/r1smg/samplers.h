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

#ifndef R1SMG_SAMPLERS_H_
#define R1SMG_SAMPLERS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "r1smg/rng.h"

namespace r1smg {

// Additive noise in query-output units.
struct NoiseVector {
  std::vector<double> components;

  int64_t size() const { return static_cast<int64_t>(components.size()); }
};

// A point on the unit sphere S^{m-1} (the Stiefel manifold V_{1,m}), m >= 2.
class UnitVector {
 public:
  // Normalizes `x`. Fails if x has fewer than two entries, non-finite entries,
  // or a norm below kMinNormBeforeNormalize.
  static absl::StatusOr<UnitVector> Normalize(std::span<const double> x);

  std::span<const double> components() const { return components_; }
  int64_t size() const { return static_cast<int64_t>(components_.size()); }

 private:
  explicit UnitVector(std::vector<double> c) : components_(std::move(c)) {}
  std::vector<double> components_;
};

// Gaussian draws whose norm falls below this are redrawn before
// normalization.
inline constexpr double kMinNormBeforeNormalize = 1e-100;

// m i.i.d. N(0, sigma^2) draws. sigma == 0 gives the zero vector.
absl::StatusOr<NoiseVector> GaussianVector(RngStream& rng, int64_t m,
                                           double sigma);

// Uniform on V_{1,m}: an i.i.d. standard normal m-vector divided by its norm.
absl::StatusOr<UnitVector> UniformUnitVector(RngStream& rng, int64_t m);

// Rank-1 singular Gaussian noise n = v * sqrt(sigma_star) * z with
// v ~ U(V_{1,m}) and z ~ N(0,1) drawn fresh. Requires m >= 3.
absl::StatusOr<NoiseVector> R1smgNoise(RngStream& rng, int64_t m,
                                       double sigma_star);

// sigma * w * h with w ~ chi(m) and h ~ U(V_{1,m}) independent. Equal in
// distribution to GaussianVector(rng, m, sigma).
absl::StatusOr<NoiseVector> ChiRadialGaussian(RngStream& rng, int64_t m,
                                              double sigma);

// Unchecked kernels behind the functions above. Callers validate arguments;
// these write into caller-owned storage so Monte Carlo loops do not allocate.
namespace kernels {

void FillGaussian(RngStream& rng, double sigma, std::span<double> out);

// Writes a uniform unit vector into `out` (size >= 2).
void FillUniformUnit(RngStream& rng, std::span<double> out);

// Writes rank-1 noise into `out` and returns the scalar z that was drawn.
double FillR1smgNoise(RngStream& rng, double sigma_star, std::span<double> out);

void FillChiRadialGaussian(RngStream& rng, double sigma, std::span<double> out);

}  // namespace kernels

}  // namespace r1smg

#endif  // R1SMG_SAMPLERS_H_
