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

#include "histogram.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "r1smg/statistics.h"

namespace r1smg::tools {

absl::Status GridSpec::Validate() const {
  if (bins_x < 1 || bins_y < 1) {
    return absl::InvalidArgumentError("grid bins must be positive");
  }
  if (bins_x > (int64_t{1} << 31) / bins_y) {
    return absl::InvalidArgumentError("grid has too many cells");
  }
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    return absl::InvalidArgumentError("x range must satisfy min < max");
  }
  if (!std::isfinite(y_min) || !std::isfinite(y_max) || !(y_min < y_max)) {
    return absl::InvalidArgumentError("y range must satisfy min < max");
  }
  return absl::OkStatus();
}

namespace {

std::optional<int64_t> BinIndex(double v, double lo, double hi, int64_t bins) {
  if (!(v >= lo && v <= hi)) return std::nullopt;
  const auto i = static_cast<int64_t>(std::floor((v - lo) / (hi - lo) * bins));
  return std::clamp<int64_t>(i, 0, bins - 1);
}

double Norm(const CompensatedSum& squares) { return std::sqrt(squares.Total()); }

}  // namespace

absl::StatusOr<GridHistogram> BinPoints(const GridSpec& spec,
                                        std::span<const Point> points) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  GridHistogram hist;
  hist.spec = spec;
  hist.counts.assign(spec.cells(), 0);
  for (const Point& p : points) {
    const auto ix = BinIndex(p.x, spec.x_min, spec.x_max, spec.bins_x);
    const auto iy = BinIndex(p.y, spec.y_min, spec.y_max, spec.bins_y);
    if (!ix || !iy) {
      ++hist.out_of_range;
      continue;
    }
    ++hist.counts[*ix * spec.bins_y + *iy];
    ++hist.in_range;
  }
  return hist;
}

std::vector<Point> GenerateClusteredPoints(RngStream& rng, int64_t n,
                                           int clusters, double spread) {
  clusters = std::max(clusters, 1);
  std::vector<Point> centres(clusters);
  for (Point& c : centres) c = {0.1 + 0.8 * rng.Uniform(), 0.1 + 0.8 * rng.Uniform()};
  std::vector<Point> points;
  points.reserve(std::max<int64_t>(n, 0));
  for (int64_t i = 0; i < n; ++i) {
    const Point& c = centres[static_cast<size_t>(rng.Uniform() * clusters) % clusters];
    Point p;
    do {
      p = {c.x + spread * rng.Normal(), c.y + spread * rng.Normal()};
    } while (!(p.x >= 0.0 && p.x < 1.0 && p.y >= 0.0 && p.y < 1.0));
    points.push_back(p);
  }
  return points;
}

absl::StatusOr<SanitizedHistogram> SanitizeHistogram(
    const GridHistogram& hist, const CalibratedMechanism& mech, RngStream& rng,
    const PostProcessing& post) {
  const int64_t cells = hist.spec.cells();
  if (static_cast<int64_t>(hist.counts.size()) != cells) {
    return absl::InvalidArgumentError("histogram counts do not match the grid");
  }
  if (!post.invalid_mask.empty() &&
      static_cast<int64_t>(post.invalid_mask.size()) != cells) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid-cell mask has ", post.invalid_mask.size(),
                     " entries, grid has ", cells));
  }
  std::vector<double> truth(hist.counts.begin(), hist.counts.end());
  auto noisy = Perturb(mech, truth, QueryShape::Matrix(hist.spec.bins_x, hist.spec.bins_y),
                       rng);
  if (!noisy.ok()) return noisy.status();

  SanitizedHistogram out;
  CompensatedSum truth_sq, err_sq;
  for (int64_t i = 0; i < cells; ++i) {
    truth_sq.Add(truth[i] * truth[i]);
    const double e = (*noisy)[i] - truth[i];
    err_sq.Add(e * e);
  }
  out.ground_truth_norm = Norm(truth_sq);
  out.error_norm = Norm(err_sq);
  if (out.ground_truth_norm > 0.0) out.ratio = out.error_norm / out.ground_truth_norm;

  out.released = std::move(*noisy);
  if (post.active()) {
    CompensatedSum pp_sq;
    for (int64_t i = 0; i < cells; ++i) {
      double& v = out.released[i];
      if (!post.invalid_mask.empty() && post.invalid_mask[i]) v = 0.0;
      if (post.clamp_negative && v < 0.0) v = 0.0;
      const double e = v - truth[i];
      pp_sq.Add(e * e);
    }
    out.post_processed_error_norm = Norm(pp_sq);
    if (out.ground_truth_norm > 0.0) {
      out.post_processed_ratio = *out.post_processed_error_norm / out.ground_truth_norm;
    }
  }
  return out;
}

}  // namespace r1smg::tools
