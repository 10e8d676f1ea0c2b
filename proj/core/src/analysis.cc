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

#include "r1smg/analysis.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "r1smg/numkernel.h"
#include "r1smg/statistics.h"

namespace r1smg {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double AngleBetween(std::span<const double> h, std::span<const double> g) {
  return std::acos(std::clamp(Dot(h, g), -1.0, 1.0));
}

// Runs `body(stream, count, acc)` over fixed-size chunks and merges the
// per-chunk accumulators in chunk order.
template <class Acc, class Body, class Merge>
Acc RunChunked(int64_t trials, RngStream& rng, int jobs, const Body& body,
               const Merge& merge) {
  const int64_t chunks = (trials + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<RngStream> streams;
  streams.reserve(chunks);
  RngStream cursor = rng;
  for (int64_t k = 0; k < chunks; ++k) {
    cursor.Jump();
    streams.push_back(cursor);
  }
  cursor.Jump();
  rng = cursor;

  std::vector<Acc> partial(chunks);
  auto run_chunk = [&](int64_t k) {
    const int64_t count = std::min(kMonteCarloChunk, trials - k * kMonteCarloChunk);
    body(streams[k], count, partial[k]);
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(chunks)));
  if (workers == 1) {
    for (int64_t k = 0; k < chunks; ++k) run_chunk(k);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int64_t k = w; k < chunks; k += workers) run_chunk(k);
      });
    }
    for (auto& t : pool) t.join();
  }
  Acc total{};
  for (const Acc& p : partial) merge(total, p);
  return total;
}

struct MomentSums {
  CompensatedSum s1, s2, s3, s4;
};

struct HitCount {
  int64_t hits = 0;
};

absl::Status CheckSameSize(std::initializer_list<int64_t> sizes) {
  const int64_t first = *sizes.begin();
  for (int64_t s : sizes) {
    if (s != first) {
      return absl::InvalidArgumentError("dimension mismatch between vectors");
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<LossMomentStats> LossMoments(const CalibratedMechanism& mech,
                                            int64_t trials, RngStream& rng,
                                            int jobs) {
  if (trials < 1000) {
    return absl::InvalidArgumentError(
        absl::StrFormat("loss moments need at least 1000 trials, got %d", trials));
  }
  const int64_t dim = NoiseDimension(mech);
  // Moments are accumulated for L / E[L] to keep L^4 in range.
  const double scale = ExpectedAccuracyLoss(mech);
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError("mechanism has no positive noise scale");
  }
  const MomentSums sums = RunChunked<MomentSums>(
      trials, rng, jobs,
      [&](RngStream& stream, int64_t count, MomentSums& acc) {
        std::vector<double> noise(dim);
        for (int64_t t = 0; t < count; ++t) {
          DrawNoise(mech, stream, noise);
          const double l = Dot(noise, noise) / scale;
          const double l2 = l * l;
          acc.s1.Add(l);
          acc.s2.Add(l2);
          acc.s3.Add(l2 * l);
          acc.s4.Add(l2 * l2);
        }
      },
      [](MomentSums& total, const MomentSums& part) {
        total.s1.Merge(part.s1);
        total.s2.Merge(part.s2);
        total.s3.Merge(part.s3);
        total.s4.Merge(part.s4);
      });
  const double n = static_cast<double>(trials);
  const double n1 = sums.s1.Total() / n, n2 = sums.s2.Total() / n;
  const double n3 = sums.s3.Total() / n, n4 = sums.s4.Total() / n;
  LossMomentStats stats;
  stats.n = trials;
  stats.m1 = n1 * scale;
  stats.m2 = n2 * scale * scale;
  stats.m3 = n3 * scale * scale * scale;
  stats.m4 = n4 * scale * scale * scale * scale;
  // Ratios from the normalized moments; the scale cancels.
  stats.kurtosis = n4 / (n2 * n2);
  stats.skewness = n3 / std::pow(n2, 1.5);
  return stats;
}

absl::StatusOr<double> PlrvGaussian(double sigma, const NoiseVector& noise,
                                    const NoiseVector& diff) {
  if (auto s = CheckSameSize({noise.size(), diff.size()}); !s.ok()) return s;
  double shifted = 0.0;
  for (int64_t i = 0; i < noise.size(); ++i) {
    const double x = noise.components[i] + diff.components[i];
    shifted += x * x;
  }
  const double base = Dot(noise.components, noise.components);
  return std::abs((base - shifted) / (2.0 * sigma * sigma));
}

absl::StatusOr<double> PlrvGaussianProjected(double sigma,
                                             const NoiseVector& noise,
                                             const NoiseVector& diff) {
  if (auto s = CheckSameSize({noise.size(), diff.size()}); !s.ok()) return s;
  const double norm_v = std::sqrt(Dot(diff.components, diff.components));
  if (norm_v == 0.0) return 0.0;
  const double lambda = Dot(noise.components, diff.components) / norm_v;
  return std::abs(norm_v * norm_v + 2.0 * lambda * norm_v) /
         (2.0 * sigma * sigma);
}

absl::StatusOr<double> PlrvR1smg(double sigma_star, const NoiseVector& s,
                                 const NoiseVector& fx, const NoiseVector& fxp,
                                 const UnitVector& h, const UnitVector& g) {
  if (auto st = CheckSameSize({s.size(), fx.size(), fxp.size(), h.size(),
                               g.size()});
      !st.ok()) {
    return st;
  }
  if (s.size() < 3) {
    return absl::InvalidArgumentError("R1SMG privacy loss needs dimension >= 3");
  }
  double rho1 = 0.0, rho2 = 0.0;
  for (int64_t i = 0; i < s.size(); ++i) {
    rho1 += g.components()[i] * (s.components[i] - fxp.components[i]);
    rho2 += h.components()[i] * (s.components[i] - fx.components[i]);
  }
  return (rho1 * rho1 - rho2 * rho2) / (2.0 * sigma_star);
}

absl::StatusOr<OnSupportOutcome> SampleOnSupportOutcome(RngStream& rng,
                                                        int64_t m,
                                                        double sigma_star,
                                                        double delta2f) {
  if (m < 3) {
    return absl::InvalidArgumentError("dimension too small for R1SMG");
  }
  if (!(sigma_star > 0.0) || !(delta2f > 0.0)) {
    return absl::InvalidArgumentError("sigma_star and delta2f must be positive");
  }
  absl::StatusOr<UnitVector> h = UniformUnitVector(rng, m);
  absl::StatusOr<UnitVector> g = UniformUnitVector(rng, m);
  absl::StatusOr<NoiseVector> fx = GaussianVector(rng, m, 10.0);
  if (!h.ok() || !g.ok() || !fx.ok()) return absl::InternalError("sampling failed");

  double a = std::sqrt(sigma_star) * rng.Normal();
  double b = std::sqrt(sigma_star) * rng.Normal();
  std::vector<double> diff(m);
  auto fill_diff = [&] {
    for (int64_t i = 0; i < m; ++i) {
      diff[i] = a * h->components()[i] - b * g->components()[i];
    }
  };
  fill_diff();
  const double dist = std::sqrt(Dot(diff, diff));
  if (dist > delta2f) {
    const double shrink = delta2f * (1.0 - rng.Uniform()) / dist;
    a *= shrink;
    b *= shrink;
    fill_diff();
  }
  NoiseVector s{std::vector<double>(m)};
  NoiseVector fxp{std::vector<double>(m)};
  for (int64_t i = 0; i < m; ++i) {
    s.components[i] = fx->components[i] + a * h->components()[i];
    fxp.components[i] = s.components[i] - b * g->components()[i];
  }
  const double theta = AngleBetween(h->components(), g->components());
  return OnSupportOutcome{std::move(s), *std::move(fx), std::move(fxp),
                          *std::move(h), *std::move(g), theta};
}

absl::StatusOr<PlrvChain> EvaluatePlrvChain(double sigma_star,
                                            const OnSupportOutcome& outcome,
                                            double delta2f) {
  absl::StatusOr<double> plrv = PlrvR1smg(sigma_star, outcome.s, outcome.fx,
                                          outcome.fxp, outcome.h, outcome.g);
  if (!plrv.ok()) return plrv.status();
  double rho1 = 0.0, rho2 = 0.0;
  for (int64_t i = 0; i < outcome.s.size(); ++i) {
    rho1 += outcome.g.components()[i] *
            (outcome.s.components[i] - outcome.fxp.components[i]);
    rho2 += outcome.h.components()[i] *
            (outcome.s.components[i] - outcome.fx.components[i]);
  }
  const double projected = std::abs(rho1) + std::abs(rho2);
  const double sine_edge = 2.0 * delta2f / std::sin(outcome.theta);
  return PlrvChain{*plrv, projected * projected / (2.0 * sigma_star),
                   sine_edge * sine_edge / (2.0 * sigma_star)};
}

absl::StatusOr<double> AngleTailBound(int64_t m, double theta0) {
  if (m < 3) {
    return absl::InvalidArgumentError("angle bound needs dimension >= 3");
  }
  if (!(theta0 >= 0.0 && theta0 <= std::numbers::pi / 2)) {
    return absl::InvalidArgumentError("theta0 must lie in [0, pi/2]");
  }
  const double md = static_cast<double>(m);
  absl::StatusOr<double> gamma_ratio = LogGammaRatio((md - 1.0) / 2.0, 0.5);
  if (!gamma_ratio.ok()) return gamma_ratio.status();
  const double c = std::cos(theta0);
  if (c <= 0.0) return 0.0;
  const double log_bound = 0.5 * std::log(std::numbers::pi) + *gamma_ratio +
                           (md - 2.0) * std::log(c);
  return std::min(1.0, std::exp(log_bound));
}

absl::StatusOr<AngleTailEstimate> AngleTailProbability(int64_t m,
                                                       double theta0,
                                                       int64_t trials,
                                                       RngStream& rng,
                                                       int jobs) {
  absl::StatusOr<double> bound = AngleTailBound(m, theta0);
  if (!bound.ok()) return bound.status();
  if (trials < 10'000) {
    return absl::InvalidArgumentError("angle tail estimates need >= 1e4 trials");
  }
  const double half_pi = std::numbers::pi / 2;
  const HitCount count = RunChunked<HitCount>(
      trials, rng, jobs,
      [&](RngStream& stream, int64_t n, HitCount& acc) {
        std::vector<double> h(m), g(m);
        for (int64_t t = 0; t < n; ++t) {
          kernels::FillUniformUnit(stream, h);
          kernels::FillUniformUnit(stream, g);
          if (std::abs(AngleBetween(h, g) - half_pi) >= theta0) ++acc.hits;
        }
      },
      [](HitCount& total, const HitCount& part) { total.hits += part.hits; });
  AngleTailEstimate est;
  est.trials = trials;
  est.hits = count.hits;
  est.empirical = static_cast<double>(count.hits) / trials;
  est.standard_error = BinomialStandardError(count.hits, trials);
  est.bound = *bound;
  return est;
}

absl::StatusOr<AuditReport> AuditR1smg(int64_t m, const PrivacyBudget& budget,
                                       int64_t trials, RngStream& rng,
                                       int jobs) {
  if (trials < 10'000) {
    return absl::InvalidArgumentError("audits need at least 1e4 trials");
  }
  absl::StatusOr<double> psi = PsiFactor(m, budget);
  if (!psi.ok()) return psi.status();
  if (!(*psi > 0.0 && *psi < 1.0)) {
    return absl::InternalError(absl::StrFormat("psi=%g outside (0, 1)", *psi));
  }
  AuditReport report;
  report.m = m;
  report.trials = trials;
  report.claimed_epsilon = budget.epsilon();
  report.claimed_delta = budget.delta();
  report.psi = *psi;
  report.theta0 = std::acos(std::sqrt(*psi));

  const double threshold = *psi;
  const HitCount count = RunChunked<HitCount>(
      trials, rng, jobs,
      [&](RngStream& stream, int64_t n, HitCount& acc) {
        std::vector<double> h(m), g(m);
        for (int64_t t = 0; t < n; ++t) {
          kernels::FillUniformUnit(stream, h);
          kernels::FillUniformUnit(stream, g);
          const double sine = std::sin(AngleBetween(h, g));
          if (sine * sine < threshold) ++acc.hits;
        }
      },
      [](HitCount& total, const HitCount& part) { total.hits += part.hits; });

  report.failures = count.hits;
  report.failure_rate = static_cast<double>(count.hits) / trials;
  report.wilson_upper_95 = WilsonInterval(count.hits, trials).upper;
  if (budget.delta() * static_cast<double>(trials) < 5.0) {
    report.zero_failure_mode = true;
    report.warnings.push_back(absl::StrFormat(
        "delta * trials = %g < 5: delta is not resolvable with %d trials; "
        "verdict requires zero failures",
        budget.delta() * static_cast<double>(trials), trials));
    report.pass = count.hits == 0;
  } else {
    report.pass = report.wilson_upper_95 <= budget.delta();
  }
  return report;
}

absl::StatusOr<std::vector<SweepRow>> LossVsDimensionSweep(
    const PrivacyBudget& budget, double delta2f,
    std::span<const int64_t> dims) {
  std::vector<SweepRow> rows;
  rows.reserve(dims.size());
  const bool with_classic = budget.epsilon() < 1.0;
  for (int64_t m : dims) {
    if (m < 3) {
      return absl::InvalidArgumentError(
          absl::StrFormat("sweep dimensions must be >= 3, got %d", m));
    }
    const QueryProfile profile{QueryShape::Vector(m), delta2f, std::nullopt};
    SweepRow row{m, std::nullopt, 0.0, 0.0};
    if (with_classic) {
      auto classic = CalibrateClassicGaussian(profile, budget);
      if (!classic.ok()) return classic.status();
      row.classic = ExpectedAccuracyLoss(*classic);
    }
    auto analytic = CalibrateAnalyticGaussian(profile, budget);
    if (!analytic.ok()) return analytic.status();
    row.analytic = ExpectedAccuracyLoss(*analytic);
    auto r1smg = CalibrateR1smg(profile, budget);
    if (!r1smg.ok()) return r1smg.status();
    row.r1smg = ExpectedAccuracyLoss(*r1smg);
    rows.push_back(row);
  }
  return rows;
}

double OuterProductRankOneResidual(std::span<const double> n) {
  const double sigma1 = Dot(n, n);
  if (sigma1 == 0.0) return 0.0;
  const double norm = std::sqrt(sigma1);
  double residual = 0.0;
  for (size_t i = 0; i < n.size(); ++i) {
    const double ui = n[i] / norm;
    for (size_t j = 0; j < n.size(); ++j) {
      const double e = n[i] * n[j] - sigma1 * ui * (n[j] / norm);
      residual += e * e;
    }
  }
  return std::sqrt(residual) / sigma1;
}

}  // namespace r1smg
