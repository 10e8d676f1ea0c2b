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

#ifndef R1SMG_RNG_H_
#define R1SMG_RNG_H_

#include <array>
#include <cstdint>

namespace r1smg {

// Reproducible pseudorandom stream: xoshiro256++ seeded through SplitMix64.
//
// The generator and the Gaussian transform (Marsaglia polar method) are
// implemented here rather than taken from <random>, so a seed produces the
// same sequence with any standard library. Independent sub-streams come from
// the xoshiro jump polynomial: Jump() advances the state by 2^128 draws, so
// streams obtained by successive jumps never overlap in practice.
//
// An RngStream is single-owner mutable state. Parallel callers must each hold
// their own stream (see Substreams()).
class RngStream {
 public:
  explicit RngStream(uint64_t seed);

  uint64_t seed() const { return seed_; }

  uint64_t NextU64();

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();

  // Standard normal variate.
  double Normal();

  // Advances by 2^128 outputs and drops any cached normal variate.
  void Jump();

  // Returns the state obtained after `k` + 1 jumps from this stream. Cheap
  // relative to any Monte Carlo chunk, but O(k).
  RngStream Substream(uint64_t k) const;

 private:
  uint64_t seed_;
  std::array<uint64_t, 4> state_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace r1smg

#endif  // R1SMG_RNG_H_
