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

#include "benchmark/benchmark.h"
#include "r1smg/composition.h"
#include "r1smg/mechanisms.h"

namespace r1smg {
namespace {

const PrivacyBudget& Budget() {
  static const PrivacyBudget b = *PrivacyBudget::Create(0.5, 1e-7);
  return b;
}

QueryProfile Profile(int64_t m) { return {QueryShape::Vector(m), 1.0, std::nullopt}; }

void BM_CalibrateR1smg(benchmark::State& state) {
  const QueryProfile p = Profile(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(CalibrateR1smg(p, Budget()));
}
BENCHMARK(BM_CalibrateR1smg)->Arg(3)->Arg(1000)->Arg(1'000'000'000);

void BM_CalibrateClassicGaussian(benchmark::State& state) {
  const QueryProfile p = Profile(1000);
  for (auto _ : state) benchmark::DoNotOptimize(CalibrateClassicGaussian(p, Budget()));
}
BENCHMARK(BM_CalibrateClassicGaussian);

void BM_CalibrateAnalyticGaussian(benchmark::State& state) {
  const QueryProfile p = Profile(1000);
  for (auto _ : state) benchmark::DoNotOptimize(CalibrateAnalyticGaussian(p, Budget()));
}
BENCHMARK(BM_CalibrateAnalyticGaussian);

void BM_CalibrateMvg(benchmark::State& state) {
  const QueryProfile p{QueryShape::Matrix(state.range(0), state.range(0)), 1.0, 10.0};
  for (auto _ : state) benchmark::DoNotOptimize(CalibrateMvgIsotropic(p, Budget()));
}
BENCHMARK(BM_CalibrateMvg)->Arg(10)->Arg(1000);

void BM_PerStepFromTotal(benchmark::State& state) {
  const CompositionPlan plan{{30.0, 256.0 / 60000.0, 1e-10}, 1.795, 1e-5};
  for (auto _ : state) benchmark::DoNotOptimize(PerStepFromTotal(plan));
}
BENCHMARK(BM_PerStepFromTotal);

}  // namespace
}  // namespace r1smg
