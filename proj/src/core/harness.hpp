#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "core/cell.hpp"
#include "core/dirichlet.hpp"
#include "core/problem.hpp"
#include "core/wholespace.hpp"

namespace homog::harness {

/*! Least-squares slope of log error against log eps.  Rows at or below the
 *  1e-13 floor are excluded up front; with fewer than two usable rows the
 *  series is floor limited and carries no slope.  After a first fit, rows
 *  whose residual exceeds three times the residual rms are flagged
 *  preasymptotic and the fit repeats without them.  The 95 percent interval
 *  uses the t quantile at (rows - 2) degrees of freedom.
 */
struct RateFit {
  bool has_slope = false;
  double slope = 0, intercept = 0;
  bool has_interval = false;
  double half_width = 0;
  bool floor_limited = false;      // at least one row excluded at the floor
  std::vector<long> floor_rows;    // excluded row indices
  std::vector<long> flagged_rows;  // preasymptotic row indices
};

RateFit fitRate(const std::vector<std::pair<double, double>>& pairs);

// real band-limited field: modes |k_j| <= max_mode of the carrier extents
// with seeded gaussian amplitudes and uniform phases, scaled to ||u|| = 1
fem::Field randomBandLimited(const fem::Grid& grid, int ncomp, int max_mode,
                             std::uint64_t seed);

// band-limited profile times a smooth bump vanishing near the carrier faces;
// scalar, compactly supported, for the weighted-inequality tests
fem::Field randomBump(const fem::Grid& grid, int max_mode, std::uint64_t seed);

/*! The configurations every property suite runs against.  `cell_resolution`
 *  is the per-family default for the periodic cell solve; `oscillatory`
 *  marks families with a non-constant coefficient (the weighted-inequality
 *  suite skips the rest).
 */
struct NamedProblem {
  std::string name;
  Problem problem;
  bool oscillatory = false;
  long cell_resolution = 0;
};

std::vector<NamedProblem> shippedFamilies();

enum class ExperimentKind { Cell, TorusSweep, DirichletSweep, Diagnostics };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Cell;
  std::string name;  // label used in reports; defaults to the kind string

  Problem problem;             // Diagnostics ignores this and runs the shipped set
  nlohmann::json problem_json; // descriptor as given, kept for the fingerprint

  std::vector<double> eps;     // strictly decreasing negative powers of two
  long cell_resolution = 256;
  long grid_per_eps = 16;      // comparison h = eps / grid_per_eps, at least 16
  long flux_refine = 4;
  double torus_extent = 4;

  CorrectorVariant variant = CorrectorVariant::Steklov;
  DirichletPath path = DirichletPath::General;
  bool bounded_corrector = false;

  std::uint64_t seed = 1;
  int jobs = 1;
  fem::SolveOptions solve;

  std::string out_csv;     // empty: "<kind>.csv"
  std::string out_report;  // empty: "<kind>-report.json"
  std::string dump_fields; // dirichlet only: directory for per-eps rasters

  std::vector<std::string> families;  // diagnostics subset; empty = all
};

// config schema: { "problem": {...} | "<family name>", "experiment": {...} };
// eps entries may be numbers or "1/k" strings
ExperimentConfig configFromJson(const nlohmann::json& j);
ExperimentConfig configFromFile(const std::string& path);

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/*! Deterministic run record: a numeric table (CSV payload), slope fits per
 *  metric, pass/fail per criterion, and a fingerprint of resolutions,
 *  tolerances and solver iteration counts.  `ok` is false when a module
 *  error aborted the run; the error text then replaces the table.
 */
struct ConvergenceReport {
  ExperimentKind kind = ExperimentKind::Cell;
  std::string name;

  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, RateFit>> fits;
  std::vector<CriterionResult> criteria;

  nlohmann::json fingerprint;
  nlohmann::json extra;  // kind-specific payload (matrices, suite reports)

  bool ok = true;
  std::string error;
  bool pass = false;
};

ConvergenceReport run(const ExperimentConfig& cfg);

// fixed formatting: %.17g, comma separated, LF line endings
std::string csvText(const ConvergenceReport& rep);
std::string reportJsonText(const ConvergenceReport& rep, const ExperimentConfig& cfg);

// writes the CSV and JSON artifacts under out_dir (created if missing);
// returns the CSV path
std::string writeArtifacts(const ConvergenceReport& rep, const ExperimentConfig& cfg,
                           const std::string& out_dir);

// reads a sweep CSV back and refits every error metric against eps
ConvergenceReport refitCsv(const std::string& csv_text);

// exit-code contract shared by the tools: 0 pass, 2 criteria fail, 3 error
int exitCode(const ConvergenceReport& rep);

}  // namespace homog::harness
