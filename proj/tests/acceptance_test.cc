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

// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "histogram.h"
#include "r1smg/analysis.h"
#include "r1smg/composition.h"
#include "r1smg/mechanisms.h"
#include "r1smg/rng.h"
#include "r1smg/samplers.h"
#include "r1smg/statistics.h"

namespace r1smg {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void Note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

PrivacyBudget Budget(double eps, double delta) { return *PrivacyBudget::Create(eps, delta); }

std::vector<int64_t> PowerGrid() {
  std::vector<int64_t> dims;
  for (int64_t m = 100; m <= 10'000'000'000LL; m *= 10) dims.push_back(m);
  return dims;
}

double SigmaStar(int64_t m, const PrivacyBudget& b, double sens) {
  auto mech = CalibrateR1smg({QueryShape::Vector(m), sens, std::nullopt}, b);
  return mech.ok() ? std::get<R1smg>(*mech).sigma_star : NAN;
}

Outcome R1smgAsymptote() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const PrivacyBudget b = Budget(1.0, 1e-7);
  double previous = INFINITY;
  bool decreasing = true;
  for (int64_t m : PowerGrid()) {
    const double s = SigmaStar(m, b, 1.0);
    decreasing = decreasing && s < previous;
    previous = s;
  }
  const double ratio = previous / 2.0;
  const double elapsed = Seconds(start);
  o.Check(decreasing, "sigma* strictly decreasing");
  o.Check(ratio > 1.0 && ratio < 1.0001, "sigma*(1e10)/2 in (1, 1.0001)");
  o.Check(elapsed < 1.0, "runtime < 1 s");
  o.Note(absl::StrFormat("sigma*(1e10)/2 - 1 = %.3e, %.3f s", ratio - 1.0, elapsed));
  return o;
}

Outcome LinearLossGrowth() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const PrivacyBudget b = Budget(0.5, 1e-7);
  double worst_classic = 0.0, worst_analytic = 0.0;
  bool below = true;
  for (int64_t m : PowerGrid()) {
    double loss[2][2];
    for (int k = 0; k < 2; ++k) {
      const QueryProfile p{QueryShape::Vector(m * (k + 1)), 1.0, std::nullopt};
      loss[0][k] = ExpectedAccuracyLoss(*CalibrateClassicGaussian(p, b));
      loss[1][k] = ExpectedAccuracyLoss(*CalibrateAnalyticGaussian(p, b));
      below = below && loss[1][k] < loss[0][k];
    }
    worst_classic = std::max(worst_classic, std::abs(loss[0][1] / loss[0][0] / 2.0 - 1.0));
    worst_analytic = std::max(worst_analytic, std::abs(loss[1][1] / loss[1][0] / 2.0 - 1.0));
  }
  const double elapsed = Seconds(start);
  o.Check(worst_classic <= 1e-12, "classic E[L] doubles with M");
  o.Check(worst_analytic <= 1e-12, "analytic E[L] linear in M");
  o.Check(below, "analytic below classic");
  o.Check(elapsed < 1.0, "runtime < 1 s");
  o.Note(absl::StrFormat("max rel. dev. classic %.1e analytic %.1e, %.3f s", worst_classic,
                         worst_analytic, elapsed));
  return o;
}

Outcome LossMean() {
  Outcome o;
  const PrivacyBudget b = Budget(1.0, 1e-5);
  for (int64_t m : {3, 10, 100}) {
    const double s = SigmaStar(m, b, 1.0);
    RngStream rng(1000 + m);
    auto stats = LossMoments(R1smg{s, m, QueryShape::Vector(m)}, 1'000'000, rng);
    const double rel = stats.ok() ? std::abs(stats->m1 / s - 1.0) : INFINITY;
    o.Check(rel <= 0.01, absl::StrFormat("mean within 1%% at M=%d", m));
    o.Note(absl::StrFormat("M=%d rel. err %.4f", m, rel));
  }
  return o;
}

Outcome Moments() {
  Outcome o;
  RngStream rng(7);
  auto r = LossMoments(R1smg{3.0, 3, QueryShape::Vector(3)}, 10'000'000, rng);
  const double kurt = 35.0 / 3.0, skew = 5.0 * std::sqrt(3.0) / 3.0;
  o.Check(r.ok() && std::abs(r->kurtosis / kurt - 1.0) <= 0.05, "R1SMG kurtosis within 5%");
  o.Check(r.ok() && std::abs(r->skewness / skew - 1.0) <= 0.03, "R1SMG skewness within 3%");
  RngStream rng2(8);
  auto c = LossMoments(ClassicGaussian{1.0, QueryShape::Vector(100)}, 1'000'000, rng2);
  const double classic = 104.0 * 106.0 / (100.0 * 102.0);
  o.Check(c.ok() && std::abs(c->kurtosis / classic - 1.0) <= 0.02,
          "classic M=100 kurtosis within 2%");
  if (r.ok() && c.ok()) {
    o.Note(absl::StrFormat("R1SMG kurt %.4f (%.4f) skew %.4f (%.4f); classic kurt %.5f (%.5f)",
                           r->kurtosis, kurt, r->skewness, skew, c->kurtosis, classic));
  }
  return o;
}

Outcome AngleTail() {
  Outcome o;
  RngStream rng(31);
  auto low = AngleTailProbability(3, std::numbers::pi / 3, 1'000'000, rng);
  o.Check(low.ok() && std::abs(low->empirical - 0.1340) <= 0.003, "M=3 tail 0.1340 +- 0.003");
  o.Check(low.ok() && low->empirical <= std::numbers::pi / 4, "M=3 tail <= pi/4");
  if (low.ok()) o.Note(absl::StrFormat("M=3 tail %.5f", low->empirical));
  int below = 0;
  for (int64_t m : {10, 100}) {
    for (double theta0 : {0.1, 0.3, 0.6}) {
      auto est = AngleTailProbability(m, theta0, 1'000'000, rng);
      const bool ok = est.ok() && est->empirical + 3.0 * est->standard_error <= est->bound;
      below += ok;
      o.Check(ok, absl::StrFormat("M=%d theta0=%.1f below bound", m, theta0));
    }
  }
  o.Note(absl::StrFormat("%d/6 tails at M in {10, 100} at least 3 SE below the bound", below));
  return o;
}

Outcome ProofBoundAudit() {
  Outcome o;
  int passed = 0, total = 0;
  for (int64_t m : {3, 10, 100}) {
    for (double eps : {0.5, 1.0}) {
      for (double delta : {0.05, 0.5}) {
        RngStream rng(500 + m);
        auto report = AuditR1smg(m, Budget(eps, delta), 1'000'000, rng);
        ++total;
        const bool ok = report.ok() && report->pass;
        passed += ok;
        o.Check(ok, absl::StrFormat("audit M=%d eps=%g delta=%g", m, eps, delta));
      }
    }
  }
  RngStream rng(7);
  auto report = AuditR1smg(3, Budget(1.0, 0.5), 1'000'000, rng);
  const double exact = 1.0 - std::sqrt(1.0 - 1.0 / (std::numbers::pi * std::numbers::pi));
  o.Check(report.ok() && std::abs(report->failure_rate - exact) <= 0.002,
          "M=3 failure rate within 0.002 of closed form");
  o.Note(absl::StrFormat("%d/%d audits pass", passed, total));
  if (report.ok()) o.Note(absl::StrFormat("M=3 rate %.5f vs %.5f", report->failure_rate, exact));
  return o;
}

Outcome PlrvChainHolds() {
  Outcome o;
  constexpr int64_t kM = 10;
  const double delta2f = 1.0;
  const double sigma_star = SigmaStar(kM, Budget(1.0, 1e-5), delta2f);
  RngStream rng(77);
  int64_t violations = 0, errors = 0;
  for (int i = 0; i < 100'000; ++i) {
    auto outcome = SampleOnSupportOutcome(rng, kM, sigma_star, delta2f);
    if (!outcome.ok()) {
      ++errors;
      continue;
    }
    auto chain = EvaluatePlrvChain(sigma_star, *outcome, delta2f);
    if (!chain.ok()) {
      ++errors;
      continue;
    }
    const double slack1 = 1e-10 * std::max(1.0, std::abs(chain->projection_bound));
    const double slack2 = 1e-10 * std::max(1.0, std::abs(chain->law_of_sines_bound));
    if (chain->plrv > chain->projection_bound + slack1 ||
        chain->projection_bound > chain->law_of_sines_bound + slack2) {
      ++violations;
    }
  }
  o.Check(violations == 0 && errors == 0, "chain holds on every sample");
  o.Note(absl::StrFormat("1e5 samples, %d violations, %d errors", violations, errors));
  return o;
}

Outcome AnalyticSolver() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst_low = 0.0, worst_high = -1.0;
  bool below = true;
  for (double eps : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double delta : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
      const PrivacyBudget b = Budget(eps, delta);
      const QueryProfile p{QueryShape::Vector(10), 1.0, std::nullopt};
      auto a = CalibrateAnalyticGaussian(p, b);
      auto c = CalibrateClassicGaussian(p, b);
      if (!a.ok() || !c.ok()) {
        o.Check(false, "calibration");
        continue;
      }
      const double sa = std::get<AnalyticGaussian>(*a).sigma_a;
      const double residual = AnalyticGaussianDelta(eps, 1.0, sa) - delta;
      worst_low = std::min(worst_low, residual);
      worst_high = std::max(worst_high, residual);
      below = below && sa < std::get<ClassicGaussian>(*c).sigma;
    }
  }
  const double elapsed = Seconds(start);
  o.Check(worst_low >= -1e-12 && worst_high <= 0.0, "residual in [-1e-12, 0]");
  o.Check(below, "sigma_A < classic sigma");
  o.Check(elapsed < 1.0, "runtime < 1 s");
  o.Note(absl::StrFormat("residual range [%.2e, %.2e], %.3f s", worst_low, worst_high, elapsed));
  return o;
}

Outcome Composition() {
  Outcome o;
  const CompositionSchedule schedule{30.0, 256.0 / 60000.0, 1e-10};
  const std::pair<double, double> cases[] = {{1.795, 0.71}, {16.983, 5.42}};
  for (const auto& [total, expected] : cases) {
    auto step = PerStepFromTotal({schedule, total, 1e-5});
    o.Check(step.ok() && std::abs(step->epsilon / expected - 1.0) <= 0.02,
            absl::StrFormat("eps0 for eps=%g", total));
    o.Check(step.ok() && std::abs(step->delta / 3.33e-7 - 1.0) <= 0.02,
            absl::StrFormat("delta0 for eps=%g", total));
    if (step.ok()) o.Note(absl::StrFormat("eps=%g -> eps0=%.4f delta0=%.4g", total, step->epsilon, step->delta));
  }
  RngStream rng(2718);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    CompositionPlan plan;
    plan.schedule.sampling_ratio = std::pow(10.0, -4.0 * rng.Uniform());
    plan.schedule.epochs = plan.schedule.sampling_ratio * (1.0 + 1e4 * rng.Uniform());
    plan.schedule.delta_prime = std::pow(10.0, -12.0 + 6.0 * rng.Uniform());
    plan.total_delta = plan.schedule.delta_prime * (1.5 + 100.0 * rng.Uniform());
    plan.total_epsilon = std::pow(10.0, -2.0 + 3.5 * rng.Uniform());
    auto step = PerStepFromTotal(plan);
    auto back = step.ok() ? TotalFromPerStep(plan.schedule, step->epsilon, step->delta)
                          : absl::StatusOr<EpsilonDelta>(step.status());
    if (!back.ok()) {
      worst = INFINITY;
      continue;
    }
    worst = std::max({worst, std::abs(back->epsilon / plan.total_epsilon - 1.0),
                      std::abs(back->delta / plan.total_delta - 1.0)});
  }
  o.Check(worst <= 1e-9, "round trip within 1e-9");
  o.Note(absl::StrFormat("round-trip max rel. err %.2e", worst));
  return o;
}

Outcome DecompositionSampler() {
  Outcome o;
  constexpr int64_t kM = 10;
  constexpr int kDraws = 100'000;
  constexpr double kSigma = 1.5;
  constexpr uint64_t kSeedChi = 1010, kSeedGauss = 2020;
  RngStream chi_rng(kSeedChi), gauss_rng(kSeedGauss);
  std::vector<double> chi_first, gauss_first;
  std::vector<CompensatedSum> m2(kM), m4(kM);
  for (int i = 0; i < kDraws; ++i) {
    auto a = ChiRadialGaussian(chi_rng, kM, kSigma);
    auto b = GaussianVector(gauss_rng, kM, kSigma);
    chi_first.push_back(a->components[0]);
    gauss_first.push_back(b->components[0]);
    for (int64_t j = 0; j < kM; ++j) {
      const double x2 = a->components[j] * a->components[j];
      m2[j].Add(x2);
      m4[j].Add(x2 * x2);
    }
  }
  const double d = KsTwoSampleStatistic(chi_first, gauss_first);
  const double crit = KsTwoSampleCriticalValue(kDraws, kDraws, 0.01);
  o.Check(d < crit, "KS non-rejection at alpha=0.01");
  const double var = kSigma * kSigma, fourth = 3.0 * var * var;
  double worst2 = 0.0, worst4 = 0.0;
  for (int64_t j = 0; j < kM; ++j) {
    worst2 = std::max(worst2, std::abs(m2[j].Total() / kDraws / var - 1.0));
    worst4 = std::max(worst4, std::abs(m4[j].Total() / kDraws / fourth - 1.0));
  }
  o.Check(worst2 <= 0.02, "per-component variance within 2%");
  o.Check(worst4 <= 0.05, "per-component fourth moment within 5%");
  o.Note(absl::StrFormat("seeds %d/%d, KS D=%.5f < %.5f, var dev %.4f, m4 dev %.4f", kSeedChi,
                         kSeedGauss, d, crit, worst2, worst4));
  return o;
}

Outcome CaseStudyOrdering() {
  Outcome o;
  const PrivacyBudget b = Budget(0.5, 1e-7);
  const tools::GridSpec grid;  // 89 x 89 over the unit square
  const QueryProfile p{QueryShape::Matrix(grid.bins_x, grid.bins_y), 2.0, std::nullopt};
  auto r1 = CalibrateR1smg(p, b);
  auto classic = CalibrateClassicGaussian(p, b);
  if (!r1.ok() || !classic.ok()) {
    o.Check(false, "calibration");
    return o;
  }
  int wins = 0;
  double r1_sum = 0.0, classic_sum = 0.0;
  for (int run = 0; run < 100; ++run) {
    RngStream data_rng(9000 + run);
    const auto points = tools::GenerateClusteredPoints(data_rng, 100'000, 8, 0.05);
    auto hist = tools::BinPoints(grid, points);
    RngStream rng_a(run), rng_b(run);
    auto a = tools::SanitizeHistogram(*hist, *r1, rng_a);
    auto c = tools::SanitizeHistogram(*hist, *classic, rng_b);
    if (!a.ok() || !c.ok() || !a->ratio || !c->ratio) continue;
    wins += *a->ratio < *c->ratio;
    r1_sum += *a->ratio;
    classic_sum += *c->ratio;
  }
  o.Check(wins >= 95, "R1SMG ratio below classic in >= 95 of 100 runs");
  o.Note(absl::StrFormat("%d/100 runs, mean ratio r1smg %.5f classic %.5f", wins,
                         r1_sum / 100, classic_sum / 100));
  return o;
}

Outcome RankOneStructure() {
  Outcome o;
  double worst = 0.0;
  for (int64_t m : {3, 50, 500}) {
    RngStream rng(40 + m);
    for (int i = 0; i < 1000; ++i) {
      auto n = R1smgNoise(rng, m, 2.0);
      worst = std::max(worst, n.ok() ? OuterProductRankOneResidual(n->components) : INFINITY);
    }
  }
  o.Check(worst < 1e-10, "sigma2/sigma1 < 1e-10");
  o.Note(absl::StrFormat("max sigma2/sigma1 bound %.2e", worst));
  return o;
}

}  // namespace
}  // namespace r1smg

int main() {
  using r1smg::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"r1smg noise scale asymptote", r1smg::R1smgAsymptote},
      {"linear loss growth of Gaussian baselines", r1smg::LinearLossGrowth},
      {"r1smg loss mean", r1smg::LossMean},
      {"loss kurtosis and skewness", r1smg::Moments},
      {"angle tail bound", r1smg::AngleTail},
      {"proof-bound audit", r1smg::ProofBoundAudit},
      {"privacy loss inequality chain", r1smg::PlrvChainHolds},
      {"analytic Gaussian solver", r1smg::AnalyticSolver},
      {"composition per-step budget", r1smg::Composition},
      {"decomposition sampler equivalence", r1smg::DecompositionSampler},
      {"histogram case study ordering", r1smg::CaseStudyOrdering},
      {"rank-1 noise structure", r1smg::RankOneStructure},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = criteria[i].second();
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str(), r1smg::Seconds(start));
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
