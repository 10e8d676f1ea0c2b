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

#include <cstdint>
#include <vector>

#include "benchmark/benchmark.h"
#include "r1smg/rng.h"
#include "r1smg/samplers.h"

namespace r1smg {
namespace {

void BM_Normal(benchmark::State& state) {
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng.Normal());
}
BENCHMARK(BM_Normal);

void BM_GaussianVector(benchmark::State& state) {
  RngStream rng(2);
  std::vector<double> out(state.range(0));
  for (auto _ : state) {
    kernels::FillGaussian(rng, 1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GaussianVector)->RangeMultiplier(10)->Range(10, 100'000);

void BM_R1smgNoise(benchmark::State& state) {
  RngStream rng(3);
  std::vector<double> out(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::FillR1smgNoise(rng, 2.0, out));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_R1smgNoise)->RangeMultiplier(10)->Range(10, 100'000);

void BM_ChiRadialGaussian(benchmark::State& state) {
  RngStream rng(4);
  std::vector<double> out(state.range(0));
  for (auto _ : state) {
    kernels::FillChiRadialGaussian(rng, 1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ChiRadialGaussian)->RangeMultiplier(10)->Range(10, 100'000);

}  // namespace
}  // namespace r1smg
