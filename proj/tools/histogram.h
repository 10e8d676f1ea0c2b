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

// 2D count query: bin points on a rectangular grid and release the grid with
// one of the calibrated mechanisms.

#ifndef R1SMG_TOOLS_HISTOGRAM_H_
#define R1SMG_TOOLS_HISTOGRAM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "r1smg/mechanisms.h"
#include "r1smg/rng.h"

namespace r1smg::tools {

struct GridSpec {
  int64_t bins_x = 89;
  int64_t bins_y = 89;
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  int64_t cells() const { return bins_x * bins_y; }
  absl::Status Validate() const;
};

struct Point {
  double x;
  double y;
};

// counts is row-major: cell (ix, iy) at ix * bins_y + iy.
struct GridHistogram {
  GridSpec spec;
  std::vector<int64_t> counts;
  int64_t in_range = 0;
  int64_t out_of_range = 0;
};

// The upper edge of each range is closed so that x_max lands in the last bin.
// Non-finite coordinates count as out of range.
absl::StatusOr<GridHistogram> BinPoints(const GridSpec& spec,
                                        std::span<const Point> points);

// Isotropic Gaussian clusters with centres in [0.1, 0.9]^2, redrawn until each
// point falls in [0, 1)^2.
std::vector<Point> GenerateClusteredPoints(RngStream& rng, int64_t n,
                                           int clusters, double spread);

struct PostProcessing {
  bool clamp_negative = false;
  // One flag per cell, true for cells to zero out.
  std::vector<bool> invalid_mask;

  bool active() const { return clamp_negative || !invalid_mask.empty(); }
};

struct SanitizedHistogram {
  // Released values, after post-processing when any is requested.
  std::vector<double> released;
  double ground_truth_norm = 0.0;
  double error_norm = 0.0;
  // error_norm / ground_truth_norm on the raw noisy grid; empty when the
  // ground truth is all zero.
  std::optional<double> ratio;
  std::optional<double> post_processed_error_norm;
  std::optional<double> post_processed_ratio;
};

// The grid is treated as a bins_x x bins_y matrix query.
absl::StatusOr<SanitizedHistogram> SanitizeHistogram(
    const GridHistogram& hist, const CalibratedMechanism& mech, RngStream& rng,
    const PostProcessing& post = {});

}  // namespace r1smg::tools

#endif  // R1SMG_TOOLS_HISTOGRAM_H_
