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

#include "cli.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "csv.h"
#include "histogram.h"
#include "json.hpp"
#include "r1smg/analysis.h"
#include "r1smg/composition.h"
#include "r1smg/mechanisms.h"
#include "r1smg/rng.h"

namespace r1smg::tools {

using Json = nlohmann::ordered_json;

int ExitCodeForStatus(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kFailedPrecondition:
      return kExitValidation;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kAlreadyExists:
      return kExitIo;
    default:
      return kExitNumerical;
  }
}

namespace {

constexpr int kSchemaVersion = 1;

std::string Num(double v) { return absl::StrFormat("%.17g", v); }

// ---------------------------------------------------------------------------
// Flags shared by several subcommands.

struct MechanismFlags {
  std::string mech = "r1smg";
  int64_t m = 0;
  int64_t rows = 0;
  int64_t cols = 0;
  double eps = 1.0;
  double delta = 1e-5;
  double sens = 1.0;
  double gamma = 0.0;
  double split = 1.0;
  CLI::Option* gamma_opt = nullptr;
};

void AddBudgetFlags(CLI::App* app, MechanismFlags& f) {
  app->add_option("--eps", f.eps, "Privacy parameter epsilon")->capture_default_str();
  app->add_option("--delta", f.delta, "Privacy parameter delta")->capture_default_str();
  app->add_option("--sens", f.sens, "L2 sensitivity of the query")->capture_default_str();
}

void AddMechanismFlags(CLI::App* app, MechanismFlags& f, bool with_shape) {
  app->add_option("--mech", f.mech, "Mechanism")
      ->check(CLI::IsMember({"r1smg", "classic", "analytic", "mvg"}))
      ->capture_default_str();
  if (with_shape) {
    app->add_option("--m", f.m, "Vector query dimension");
    app->add_option("--rows", f.rows, "Matrix query rows");
    app->add_option("--cols", f.cols, "Matrix query columns");
  }
  AddBudgetFlags(app, f);
  f.gamma_opt = app->add_option("--gamma", f.gamma,
                                "Frobenius-norm bound of the query (mvg only)");
  app->add_option("--split", f.split, "Row/column scale ratio (mvg only)")
      ->capture_default_str();
}

absl::StatusOr<QueryShape> ResolveShape(const MechanismFlags& f) {
  if (f.rows != 0 || f.cols != 0) {
    if (f.rows < 1 || f.cols < 1) {
      return absl::InvalidArgumentError("--rows and --cols must both be >= 1");
    }
    if (f.m != 0) return absl::InvalidArgumentError("give --m or --rows/--cols, not both");
    return QueryShape::Matrix(f.rows, f.cols);
  }
  if (f.m < 1) return absl::InvalidArgumentError("query dimension --m must be >= 1");
  return QueryShape::Vector(f.m);
}

absl::StatusOr<CalibratedMechanism> BuildMechanism(const MechanismFlags& f,
                                                   const QueryShape& shape) {
  absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(f.eps, f.delta);
  if (!budget.ok()) return budget.status();
  QueryProfile profile{shape, f.sens, std::nullopt};
  if (f.gamma_opt != nullptr && f.gamma_opt->count() > 0) profile.frobenius_sup = f.gamma;
  if (f.mech == "r1smg") return CalibrateR1smg(profile, *budget);
  if (f.mech == "classic") return CalibrateClassicGaussian(profile, *budget);
  if (f.mech == "analytic") return CalibrateAnalyticGaussian(profile, *budget);
  if (!profile.frobenius_sup.has_value()) {
    return absl::InvalidArgumentError("mvg needs --gamma");
  }
  return CalibrateMvgIsotropic(profile, *budget, f.split);
}

Json MechanismFlagsJson(const MechanismFlags& f, bool with_shape) {
  Json j;
  j["mech"] = f.mech;
  if (with_shape) {
    j["m"] = f.m;
    j["rows"] = f.rows;
    j["cols"] = f.cols;
  }
  j["eps"] = f.eps;
  j["delta"] = f.delta;
  j["sens"] = f.sens;
  if (f.gamma_opt != nullptr && f.gamma_opt->count() > 0) j["gamma"] = f.gamma;
  if (f.mech == "mvg") j["split"] = f.split;
  return j;
}

Json MechanismJson(const CalibratedMechanism& mech) {
  Json j;
  j["name"] = MechanismName(mech);
  std::visit(
      [&j](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ClassicGaussian>) {
          j["sigma"] = m.sigma;
        } else if constexpr (std::is_same_v<T, AnalyticGaussian>) {
          j["sigma_a"] = m.sigma_a;
        } else if constexpr (std::is_same_v<T, R1smg>) {
          j["sigma_star"] = m.sigma_star;
        } else {
          j["row_scale"] = m.row_scale;
          j["col_scale"] = m.col_scale;
        }
      },
      mech);
  j["noise_dimension"] = NoiseDimension(mech);
  j["expected_loss"] = ExpectedAccuracyLoss(mech);
  return j;
}

std::string MechanismLine(const CalibratedMechanism& mech) {
  std::string line = "mechanism=" + MechanismName(mech);
  const Json fields = MechanismJson(mech);
  for (const auto& [key, value] : fields.items()) {
    if (key == "name" || key == "noise_dimension") continue;
    absl::StrAppend(&line, " ", key, "=", absl::StrFormat("%.10g", value.get<double>()));
  }
  return line;
}

Json Envelope(const std::string& command) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

// ---------------------------------------------------------------------------
// I/O helpers. An empty path or "-" means the output stream.

absl::Status WriteText(const std::string& path, const std::string& text,
                       std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return absl::OkStatus();
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) return absl::UnavailableError(absl::StrCat("cannot open ", path, " for writing"));
  file << text;
  file.close();
  if (!file) return absl::UnavailableError(absl::StrCat("write to ", path, " failed"));
  return absl::OkStatus();
}

absl::Status WriteJson(const std::string& path, const Json& j, std::ostream& out) {
  return WriteText(path, j.dump(2) + "\n", out);
}

absl::StatusOr<CsvTable> ReadCsvFile(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  absl::StatusOr<CsvTable> table = ReadCsv(file);
  if (file.bad()) return absl::DataLossError(absl::StrCat("read from ", path, " failed"));
  if (!table.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", table.status().message()));
  }
  return table;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateFlags {
  MechanismFlags mech;
  std::string json_path;
};

absl::Status RunCalibrate(const CalibrateFlags& f, std::ostream& out) {
  absl::StatusOr<QueryShape> shape = ResolveShape(f.mech);
  if (!shape.ok()) return shape.status();
  absl::StatusOr<CalibratedMechanism> mech = BuildMechanism(f.mech, *shape);
  if (!mech.ok()) return mech.status();
  out << MechanismLine(*mech) << "\n";
  if (f.json_path.empty()) return absl::OkStatus();
  Json j = Envelope("calibrate");
  j["inputs"] = MechanismFlagsJson(f.mech, true);
  j["mechanism"] = MechanismJson(*mech);
  return WriteJson(f.json_path, j, out);
}

// ---------------------------------------------------------------------------
// perturb

struct PerturbFlags {
  MechanismFlags mech;
  std::string input;
  std::string out_path;
  std::string report_path;
  uint64_t seed = kDefaultSeed;
};

absl::Status RunPerturb(const PerturbFlags& f, std::ostream& out) {
  absl::StatusOr<CsvTable> table = ReadCsvFile(f.input);
  if (!table.ok()) return table.status();
  const size_t cols = table->header.size();
  const size_t rows = table->records.size();
  if (rows == 0) return absl::InvalidArgumentError(absl::StrCat(f.input, ": no data rows"));
  std::vector<double> values;
  values.reserve(rows * cols);
  for (const CsvRecord& rec : table->records) {
    if (rec.fields.size() != cols || rec.unterminated_quote) {
      return absl::InvalidArgumentError(
          absl::StrCat(f.input, ":", rec.line, ": expected ", cols, " fields"));
    }
    for (const std::string& cell : rec.fields) {
      std::optional<double> v = ParseDouble(cell);
      if (!v || !std::isfinite(*v)) {
        return absl::InvalidArgumentError(
            absl::StrCat(f.input, ":", rec.line, ": not a finite number: '", cell, "'"));
      }
      values.push_back(*v);
    }
  }
  const QueryShape shape = cols == 1 ? QueryShape::Vector(static_cast<int64_t>(rows))
                                     : QueryShape::Matrix(static_cast<int64_t>(rows),
                                                          static_cast<int64_t>(cols));
  absl::StatusOr<CalibratedMechanism> mech = BuildMechanism(f.mech, shape);
  if (!mech.ok()) return mech.status();
  RngStream rng(f.seed);
  absl::StatusOr<std::vector<double>> noisy = Perturb(*mech, values, shape, rng);
  if (!noisy.ok()) return noisy.status();

  std::string csv;
  for (size_t c = 0; c < cols; ++c) {
    absl::StrAppend(&csv, c ? "," : "", CsvField(table->header[c]));
  }
  csv += "\n";
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) {
      absl::StrAppend(&csv, c ? "," : "", Num((*noisy)[r * cols + c]));
    }
    csv += "\n";
  }
  if (auto s = WriteText(f.out_path, csv, out); !s.ok()) return s;
  if (f.report_path.empty()) return absl::OkStatus();
  Json j = Envelope("perturb");
  j["seed"] = f.seed;
  Json inputs = MechanismFlagsJson(f.mech, false);
  inputs["input"] = f.input;
  inputs["rows"] = rows;
  inputs["cols"] = cols;
  j["inputs"] = inputs;
  j["mechanism"] = MechanismJson(*mech);
  return WriteJson(f.report_path, j, out);
}

// ---------------------------------------------------------------------------
// histogram

struct HistogramFlags {
  MechanismFlags mech;
  GridSpec grid;
  std::string input;
  std::string out_path;
  std::string report_path;
  std::string mask_path;
  std::string ground_truth_path;
  bool strict = false;
  bool clamp_negative = false;
  uint64_t seed = kDefaultSeed;
};

struct PointIngest {
  std::vector<Point> points;
  int64_t rows = 0;
  int64_t skipped = 0;
  int64_t first_skipped_line = 0;
};

absl::StatusOr<PointIngest> ReadPoints(const std::string& path, bool strict) {
  absl::StatusOr<CsvTable> table = ReadCsvFile(path);
  if (!table.ok()) return table.status();
  const auto xc = table->Column("x");
  const auto yc = table->Column("y");
  if (!xc || !yc) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": header must name columns x and y"));
  }
  PointIngest ingest;
  for (const CsvRecord& rec : table->records) {
    ++ingest.rows;
    std::optional<double> x, y;
    if (rec.fields.size() == table->header.size() && !rec.unterminated_quote) {
      x = ParseDouble(rec.fields[*xc]);
      y = ParseDouble(rec.fields[*yc]);
    }
    if (!x || !y || std::isnan(*x) || std::isnan(*y)) {
      if (strict) {
        return absl::InvalidArgumentError(absl::StrCat(path, ":", rec.line, ": malformed row"));
      }
      if (ingest.skipped++ == 0) ingest.first_skipped_line = rec.line;
      continue;
    }
    ingest.points.push_back({*x, *y});
  }
  return ingest;
}

absl::StatusOr<std::vector<bool>> ReadMask(const std::string& path, const GridSpec& grid) {
  absl::StatusOr<CsvTable> table = ReadCsvFile(path);
  if (!table.ok()) return table.status();
  const auto xc = table->Column("ix");
  const auto yc = table->Column("iy");
  if (!xc || !yc) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": header must name columns ix and iy"));
  }
  std::vector<bool> mask(grid.cells(), false);
  for (const CsvRecord& rec : table->records) {
    std::optional<int64_t> ix, iy;
    if (rec.fields.size() == table->header.size()) {
      ix = ParseInt(rec.fields[*xc]);
      iy = ParseInt(rec.fields[*yc]);
    }
    if (!ix || !iy || *ix < 0 || *ix >= grid.bins_x || *iy < 0 || *iy >= grid.bins_y) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", rec.line, ": mask cell outside the grid"));
    }
    mask[*ix * grid.bins_y + *iy] = true;
  }
  return mask;
}

std::string GridCsv(const GridSpec& grid, const std::string& column,
                    const std::function<std::string(int64_t)>& cell) {
  std::string csv = absl::StrCat("ix,iy,", column, "\n");
  for (int64_t ix = 0; ix < grid.bins_x; ++ix) {
    for (int64_t iy = 0; iy < grid.bins_y; ++iy) {
      absl::StrAppend(&csv, ix, ",", iy, ",", cell(ix * grid.bins_y + iy), "\n");
    }
  }
  return csv;
}

Json RatioJson(std::optional<double> ratio) {
  if (ratio.has_value()) return *ratio;
  return "inf";
}

absl::Status RunHistogram(const HistogramFlags& f, std::ostream& out, std::ostream& err) {
  if (auto s = f.grid.Validate(); !s.ok()) return s;
  const QueryShape shape = QueryShape::Matrix(f.grid.bins_x, f.grid.bins_y);
  // Validate the whole configuration before touching the data.
  absl::StatusOr<CalibratedMechanism> mech = BuildMechanism(f.mech, shape);
  if (!mech.ok()) return mech.status();
  PostProcessing post;
  post.clamp_negative = f.clamp_negative;
  if (!f.mask_path.empty()) {
    absl::StatusOr<std::vector<bool>> mask = ReadMask(f.mask_path, f.grid);
    if (!mask.ok()) return mask.status();
    post.invalid_mask = std::move(*mask);
  }
  absl::StatusOr<PointIngest> ingest = ReadPoints(f.input, f.strict);
  if (!ingest.ok()) return ingest.status();
  if (ingest->skipped > 0) {
    err << "warning: skipped " << ingest->skipped << " malformed row(s) in " << f.input
        << " (first at line " << ingest->first_skipped_line << ")\n";
  }
  absl::StatusOr<GridHistogram> hist = BinPoints(f.grid, ingest->points);
  if (!hist.ok()) return hist.status();
  RngStream rng(f.seed);
  absl::StatusOr<SanitizedHistogram> released = SanitizeHistogram(*hist, *mech, rng, post);
  if (!released.ok()) return released.status();

  const std::string csv = GridCsv(f.grid, "value",
                                  [&](int64_t i) { return Num(released->released[i]); });
  if (auto s = WriteText(f.out_path, csv, out); !s.ok()) return s;
  if (!f.ground_truth_path.empty()) {
    const std::string truth = GridCsv(f.grid, "count", [&](int64_t i) {
      return absl::StrCat(hist->counts[i]);
    });
    if (auto s = WriteText(f.ground_truth_path, truth, out); !s.ok()) return s;
  }

  Json j = Envelope("histogram");
  j["seed"] = f.seed;
  Json inputs = MechanismFlagsJson(f.mech, false);
  inputs["input"] = f.input;
  inputs["bins_x"] = f.grid.bins_x;
  inputs["bins_y"] = f.grid.bins_y;
  inputs["x_range"] = {f.grid.x_min, f.grid.x_max};
  inputs["y_range"] = {f.grid.y_min, f.grid.y_max};
  inputs["strict"] = f.strict;
  inputs["clamp_negative"] = f.clamp_negative;
  inputs["mask"] = f.mask_path;
  inputs["emit_ground_truth"] = !f.ground_truth_path.empty();
  j["inputs"] = inputs;
  j["mechanism"] = MechanismJson(*mech);
  j["ingestion"] = {{"rows", ingest->rows},
                    {"skipped_rows", ingest->skipped},
                    {"in_range", hist->in_range},
                    {"out_of_range", hist->out_of_range}};
  Json metrics;
  metrics["ground_truth_norm"] = released->ground_truth_norm;
  metrics["error_norm"] = released->error_norm;
  metrics["error_over_ground_truth"] = RatioJson(released->ratio);
  if (post.active()) {
    int64_t masked = 0;
    for (bool b : post.invalid_mask) masked += b;
    metrics["post_processed"] = {
        {"clamp_negative", post.clamp_negative},
        {"masked_cells", masked},
        {"error_norm", *released->post_processed_error_norm},
        {"error_over_ground_truth", RatioJson(released->post_processed_ratio)}};
  }
  j["metrics"] = metrics;
  j["notes"] = Json::array(
      {"metrics describe the raw counts and are for evaluation only; the report "
       "is not a private release",
       "clamping and masking act on the released grid only and leave the "
       "privacy guarantee unchanged"});
  if (f.report_path.empty()) {
    err << "error_over_ground_truth=" << RatioJson(released->ratio).dump() << "\n";
    return absl::OkStatus();
  }
  return WriteJson(f.report_path, j, out);
}

// ---------------------------------------------------------------------------
// sweep

struct SweepFlags {
  MechanismFlags budget;
  std::vector<int64_t> dims;
  std::string out_path;
};

std::vector<int64_t> DefaultSweepDims() {
  std::vector<int64_t> dims;
  for (int64_t m = 100; m <= 10'000'000'000LL; m *= 10) dims.push_back(m);
  return dims;
}

absl::Status RunSweep(const SweepFlags& f, std::ostream& out) {
  absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(f.budget.eps, f.budget.delta);
  if (!budget.ok()) return budget.status();
  const std::vector<int64_t> dims = f.dims.empty() ? DefaultSweepDims() : f.dims;
  absl::StatusOr<std::vector<SweepRow>> rows =
      LossVsDimensionSweep(*budget, f.budget.sens, dims);
  if (!rows.ok()) return rows.status();
  std::string csv = "M,classic,analytic,r1smg\n";
  for (const SweepRow& row : *rows) {
    absl::StrAppend(&csv, row.m, ",", row.classic ? Num(*row.classic) : "", ",",
                    Num(row.analytic), ",", Num(row.r1smg), "\n");
  }
  return WriteText(f.out_path, csv, out);
}

// ---------------------------------------------------------------------------
// moments

struct MonteCarloFlags {
  int64_t trials = 1'000'000;
  uint64_t seed = kDefaultSeed;
  int jobs = 1;
  std::string out_path;
};

void AddMonteCarloFlags(CLI::App* app, MonteCarloFlags& f) {
  app->add_option("--trials", f.trials, "Monte Carlo trials")->capture_default_str();
  app->add_option("--seed", f.seed, "Random seed")
      ->envname(kSeedEnvVar)
      ->capture_default_str();
  app->add_option("--jobs", f.jobs, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--out", f.out_path, "Report path (default stdout)");
}

void EchoMonteCarlo(Json& j, const MonteCarloFlags& f) {
  j["seed"] = f.seed;
  j["trials"] = f.trials;
  j["jobs"] = f.jobs;
}

struct MomentsFlags {
  MechanismFlags mech;
  MonteCarloFlags mc;
};

absl::Status RunMoments(const MomentsFlags& f, std::ostream& out) {
  absl::StatusOr<QueryShape> shape = ResolveShape(f.mech);
  if (!shape.ok()) return shape.status();
  absl::StatusOr<CalibratedMechanism> mech = BuildMechanism(f.mech, *shape);
  if (!mech.ok()) return mech.status();
  RngStream rng(f.mc.seed);
  absl::StatusOr<LossMomentStats> stats = LossMoments(*mech, f.mc.trials, rng, f.mc.jobs);
  if (!stats.ok()) return stats.status();
  Json j = Envelope("moments");
  EchoMonteCarlo(j, f.mc);
  j["inputs"] = MechanismFlagsJson(f.mech, true);
  j["mechanism"] = MechanismJson(*mech);
  j["moments"] = {{"n", stats->n},       {"mean", stats->m1},
                  {"m2", stats->m2},     {"m3", stats->m3},
                  {"m4", stats->m4},     {"kurtosis", stats->kurtosis},
                  {"skewness", stats->skewness}};
  if (std::holds_alternative<R1smg>(*mech)) {
    j["reference"] = {{"kurtosis", 35.0 / 3.0}, {"skewness", 5.0 * std::sqrt(3.0) / 3.0}};
  } else if (std::holds_alternative<ClassicGaussian>(*mech) ||
             std::holds_alternative<AnalyticGaussian>(*mech)) {
    const double m = static_cast<double>(NoiseDimension(*mech));
    j["reference"] = {
        {"kurtosis", (m + 4.0) * (m + 6.0) / (m * (m + 2.0))},
        {"skewness", (m + 4.0) / std::sqrt(m * (m + 2.0))}};
  }
  return WriteJson(f.mc.out_path, j, out);
}

// ---------------------------------------------------------------------------
// audit

struct AuditFlags {
  MechanismFlags budget;
  int64_t m = 0;
  MonteCarloFlags mc;
};

absl::Status RunAudit(const AuditFlags& f, std::ostream& out) {
  absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Create(f.budget.eps, f.budget.delta);
  if (!budget.ok()) return budget.status();
  RngStream rng(f.mc.seed);
  absl::StatusOr<AuditReport> report = AuditR1smg(f.m, *budget, f.mc.trials, rng, f.mc.jobs);
  if (!report.ok()) return report.status();
  Json j = Envelope("audit");
  EchoMonteCarlo(j, f.mc);
  j["inputs"] = {{"m", f.m}, {"eps", f.budget.eps}, {"delta", f.budget.delta}};
  j["psi"] = report->psi;
  j["theta0"] = report->theta0;
  j["failures"] = report->failures;
  j["failure_rate"] = report->failure_rate;
  j["wilson_upper_95"] = report->wilson_upper_95;
  j["zero_failure_mode"] = report->zero_failure_mode;
  j["verdict"] = report->pass ? "pass" : "fail";
  j["warnings"] = report->warnings;
  return WriteJson(f.mc.out_path, j, out);
}

// ---------------------------------------------------------------------------
// compose

struct ComposeFlags {
  double eps = 0.0;
  double delta = 0.0;
  double delta_prime = 1e-10;
  double epochs = 1.0;
  double q = 1.0;
  double eps0 = 0.0;
  double delta0 = 0.0;
  CLI::Option* eps0_opt = nullptr;
  CLI::Option* delta0_opt = nullptr;
  CLI::Option* eps_opt = nullptr;
  CLI::Option* delta_opt = nullptr;
  std::string out_path;
};

absl::Status RunCompose(const ComposeFlags& f, std::ostream& out) {
  const CompositionSchedule schedule{f.epochs, f.q, f.delta_prime};
  const bool forward = f.eps0_opt->count() > 0 || f.delta0_opt->count() > 0;
  Json j = Envelope("compose");
  Json inputs = {{"epochs", f.epochs}, {"q", f.q}, {"delta_prime", f.delta_prime}};
  if (forward) {
    if (f.eps0_opt->count() == 0 || f.delta0_opt->count() == 0) {
      return absl::InvalidArgumentError("forward mode needs both --eps0 and --delta0");
    }
    absl::StatusOr<EpsilonDelta> total = TotalFromPerStep(schedule, f.eps0, f.delta0);
    if (!total.ok()) return total.status();
    inputs["eps0"] = f.eps0;
    inputs["delta0"] = f.delta0;
    j["mode"] = "total_from_per_step";
    j["inputs"] = inputs;
    j["steps"] = schedule.steps();
    j["eps"] = total->epsilon;
    j["delta"] = total->delta;
  } else {
    if (f.eps_opt->count() == 0 || f.delta_opt->count() == 0) {
      return absl::InvalidArgumentError("compose needs --eps and --delta (or --eps0 and --delta0)");
    }
    absl::StatusOr<EpsilonDelta> step = PerStepFromTotal({schedule, f.eps, f.delta});
    if (!step.ok()) return step.status();
    inputs["eps"] = f.eps;
    inputs["delta"] = f.delta;
    j["mode"] = "per_step_from_total";
    j["inputs"] = inputs;
    j["steps"] = schedule.steps();
    j["eps0"] = step->epsilon;
    j["delta0"] = step->delta;
  }
  return WriteJson(f.out_path, j, out);
}

// ---------------------------------------------------------------------------
// gen-points

struct GenPointsFlags {
  int64_t n = 100'000;
  int clusters = 8;
  double spread = 0.05;
  uint64_t seed = kDefaultSeed;
  std::string out_path;
};

absl::Status RunGenPoints(const GenPointsFlags& f, std::ostream& out) {
  if (f.n < 0) return absl::InvalidArgumentError("--n must be >= 0");
  if (f.clusters < 1) return absl::InvalidArgumentError("--clusters must be >= 1");
  if (!(f.spread > 0.0) || !std::isfinite(f.spread)) {
    return absl::InvalidArgumentError("--spread must be positive");
  }
  RngStream rng(f.seed);
  const std::vector<Point> points = GenerateClusteredPoints(rng, f.n, f.clusters, f.spread);
  std::string csv = "x,y\n";
  csv.reserve(points.size() * 40);
  for (const Point& p : points) {
    absl::StrAppend(&csv, Num(p.x), ",", Num(p.y), "\n");
  }
  return WriteText(f.out_path, csv, out);
}

void AddConfig(CLI::App* app, std::string& sink) {
  app->add_option("--config", sink, "TOML/INI file with flag values; flags win");
}

bool GivenOnCommandLine(const std::vector<std::string>& args, const std::string& flag) {
  for (const std::string& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

bool Truthy(const std::string& v) {
  return v == "true" || v == "1" || v == "yes" || v == "on";
}

// Splices the keys of a --config file into the argument list as flags of the
// selected subcommand. Keys at top level or under a section named after the
// subcommand apply; other keys are ignored. A key whose flag was given on the
// command line is skipped.
absl::StatusOr<std::vector<std::string>> ExpandConfig(const CLI::App& app,
                                                      const std::vector<std::string>& args) {
  if (args.empty()) return args;
  const CLI::App* sub = nullptr;
  for (const CLI::App* candidate : app.get_subcommands({})) {
    if (candidate->get_name() == args[0]) sub = candidate;
  }
  if (sub == nullptr) return args;

  std::vector<std::string> rest;
  std::string path;
  for (size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size()) return absl::InvalidArgumentError("--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;
  if (!std::ifstream(path)) return absl::NotFoundError(absl::StrCat("cannot open ", path));

  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", e.what()));
  }
  std::vector<std::string> expanded = {args[0]};
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() &&
        !(item.parents.size() == 1 && item.parents[0] == sub->get_name())) {
      continue;
    }
    const std::string flag = "--" + item.name;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr || flag == "--config" || GivenOnCommandLine(rest, flag)) continue;
    if (opt->get_expected_max() == 0) {
      if (!item.inputs.empty() && Truthy(item.inputs.front())) expanded.push_back(flag);
      continue;
    }
    expanded.push_back(flag);
    expanded.insert(expanded.end(), item.inputs.begin(), item.inputs.end());
  }
  expanded.insert(expanded.end(), rest.begin(), rest.end());
  return expanded;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Output perturbation with rank-1 singular Gaussian noise and baselines",
               "r1smg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "r1smg 0.1.0");
  std::string config_path;  // consumed by ExpandConfig before parsing

  CalibrateFlags calibrate;
  CLI::App* calibrate_cmd = app.add_subcommand("calibrate", "Calibrate a mechanism");
  AddMechanismFlags(calibrate_cmd, calibrate.mech, true);
  calibrate_cmd->add_option("--json", calibrate.json_path, "Also write a JSON report");
  AddConfig(calibrate_cmd, config_path);

  PerturbFlags perturb;
  CLI::App* perturb_cmd = app.add_subcommand("perturb", "Perturb a numeric CSV query answer");
  AddMechanismFlags(perturb_cmd, perturb.mech, false);
  perturb_cmd->add_option("--input", perturb.input, "CSV with header")->required();
  perturb_cmd->add_option("--out", perturb.out_path, "Output CSV (default stdout)");
  perturb_cmd->add_option("--report", perturb.report_path, "JSON report path");
  perturb_cmd->add_option("--seed", perturb.seed, "Random seed")
      ->envname(kSeedEnvVar)
      ->capture_default_str();
  AddConfig(perturb_cmd, config_path);

  HistogramFlags histogram;
  histogram.mech.sens = 2.0;
  CLI::App* histogram_cmd =
      app.add_subcommand("histogram", "Release a 2D count grid built from points");
  AddMechanismFlags(histogram_cmd, histogram.mech, false);
  histogram_cmd->add_option("--input", histogram.input, "CSV with x,y columns")->required();
  histogram_cmd->add_option("--bins-x", histogram.grid.bins_x)->capture_default_str();
  histogram_cmd->add_option("--bins-y", histogram.grid.bins_y)->capture_default_str();
  histogram_cmd->add_option("--x-min", histogram.grid.x_min)->capture_default_str();
  histogram_cmd->add_option("--x-max", histogram.grid.x_max)->capture_default_str();
  histogram_cmd->add_option("--y-min", histogram.grid.y_min)->capture_default_str();
  histogram_cmd->add_option("--y-max", histogram.grid.y_max)->capture_default_str();
  histogram_cmd->add_option("--out", histogram.out_path, "Sanitized grid CSV (default stdout)");
  histogram_cmd->add_option("--report", histogram.report_path, "JSON report path");
  histogram_cmd->add_option("--mask", histogram.mask_path,
                            "CSV of invalid cells (ix,iy) to zero after release");
  histogram_cmd->add_flag("--clamp-negative", histogram.clamp_negative,
                          "Clamp released counts at zero");
  histogram_cmd->add_flag("--strict", histogram.strict, "Fail on malformed rows");
  histogram_cmd->add_option("--emit-ground-truth", histogram.ground_truth_path,
                            "Write the unperturbed grid here (not private)");
  histogram_cmd->add_option("--seed", histogram.seed, "Random seed")
      ->envname(kSeedEnvVar)
      ->capture_default_str();
  AddConfig(histogram_cmd, config_path);

  SweepFlags sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Expected loss against query dimension");
  AddBudgetFlags(sweep_cmd, sweep.budget);
  sweep_cmd->add_option("--dims", sweep.dims, "Comma-separated dimensions (default 1e2..1e10)")
      ->delimiter(',');
  sweep_cmd->add_option("--out", sweep.out_path, "Output CSV (default stdout)");
  AddConfig(sweep_cmd, config_path);

  MomentsFlags moments;
  CLI::App* moments_cmd = app.add_subcommand("moments", "Monte Carlo moments of the loss");
  AddMechanismFlags(moments_cmd, moments.mech, true);
  AddMonteCarloFlags(moments_cmd, moments.mc);
  AddConfig(moments_cmd, config_path);

  AuditFlags audit;
  CLI::App* audit_cmd = app.add_subcommand("audit", "Monte Carlo audit of the failure event");
  audit_cmd->add_option("--m", audit.m, "Query dimension")->required();
  AddBudgetFlags(audit_cmd, audit.budget);
  AddMonteCarloFlags(audit_cmd, audit.mc);
  AddConfig(audit_cmd, config_path);

  ComposeFlags compose;
  CLI::App* compose_cmd = app.add_subcommand("compose", "Per-step budget under composition");
  compose.eps_opt = compose_cmd->add_option("--eps", compose.eps, "Total epsilon");
  compose.delta_opt = compose_cmd->add_option("--delta", compose.delta, "Total delta");
  compose_cmd->add_option("--delta-prime", compose.delta_prime)->capture_default_str();
  compose_cmd->add_option("--epochs", compose.epochs)->capture_default_str();
  compose_cmd->add_option("--q", compose.q, "Sampling ratio")->capture_default_str();
  compose.eps0_opt = compose_cmd->add_option("--eps0", compose.eps0, "Per-step epsilon");
  compose.delta0_opt = compose_cmd->add_option("--delta0", compose.delta0, "Per-step delta");
  compose_cmd->add_option("--out", compose.out_path, "Report path (default stdout)");
  AddConfig(compose_cmd, config_path);

  GenPointsFlags gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-points", "Synthetic clustered 2D points");
  gen_cmd->add_option("--n", gen.n, "Number of points")->capture_default_str();
  gen_cmd->add_option("--clusters", gen.clusters)->capture_default_str();
  gen_cmd->add_option("--spread", gen.spread, "Cluster standard deviation")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")
      ->envname(kSeedEnvVar)
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out_path, "Output CSV (default stdout)");
  AddConfig(gen_cmd, config_path);

  absl::StatusOr<std::vector<std::string>> expanded = ExpandConfig(app, args);
  if (!expanded.ok()) {
    err << "error: " << expanded.status().message() << "\n";
    return ExitCodeForStatus(expanded.status());
  }
  std::vector<std::string> reversed(expanded->rbegin(), expanded->rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : (e.get_name() == "FileError" ? kExitIo : kExitValidation);
  }

  absl::Status status;
  if (*calibrate_cmd) {
    status = RunCalibrate(calibrate, out);
  } else if (*perturb_cmd) {
    status = RunPerturb(perturb, out);
  } else if (*histogram_cmd) {
    status = RunHistogram(histogram, out, err);
  } else if (*sweep_cmd) {
    status = RunSweep(sweep, out);
  } else if (*moments_cmd) {
    status = RunMoments(moments, out);
  } else if (*audit_cmd) {
    status = RunAudit(audit, out);
  } else if (*compose_cmd) {
    status = RunCompose(compose, out);
  } else {
    status = RunGenPoints(gen, out);
  }
  if (!status.ok()) err << "error: " << status.message() << "\n";
  return ExitCodeForStatus(status);
}

}  // namespace r1smg::tools
