#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksmix/config.hpp"
#include "ksmix/inequalities.hpp"
#include "ksmix/output.hpp"
#include "ksmix/solver.hpp"

namespace ksmix {

struct SweepRow {
  double amplitude = 0.0;
  Termination termination = Termination::COMPLETED;
  DetectorClause clause = DetectorClause::NONE;
  double sup_l2_dev = 0.0;
  /// NaN when not applicable (non-completing run or no decay to fit).
  double kappa = 0.0;
  /// NaN unless the detector fired.
  double blowup_time = 0.0;
  double final_time = 0.0;
  std::size_t steps = 0;
  std::vector<DiagnosticsRecord> records;
  std::optional<SnapshotData> final_snapshot;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Least amplitude that completed with sup l2_dev <= 2B.
  std::optional<double> a0_hat;
  double horizon = 0.0;
  double B = 0.0;
  /// Zero-flow detection time used to set the horizon; NaN if not measured.
  double baseline_time = 0.0;
};

/// Everything a scenario produces: assertions and files.
struct ScenarioReport {
  Scenario scenario = Scenario::RUN;
  std::vector<Verdict> verdicts;
  std::vector<OutputFile> files;
  /// Set when the run itself ended in a numerical abort.
  bool numerical_abort = false;

  bool all_pass() const;
};

/// Least-squares slope of -log(l2_dev) over records with t in [delta, T].
/// NaN if fewer than two usable points.
double fit_decay_rate(const std::vector<DiagnosticsRecord>& records, double delta, double T);

/// True if v is non-increasing apart from at most one adjacent rise of at most
/// `tolerance` relative.
bool nonincreasing_with_tolerance(const std::vector<double>& v, double tolerance);
/// Same test for strict decrease.
bool decreasing_with_tolerance(const std::vector<double>& v, double tolerance);

struct BlowupResult {
  SweepResult sweep;
  /// (t, rate, leading_term) at each stored record.
  std::vector<std::array<double, 3>> second_moment;
  /// Detection time at scenario.compare_resolution; NaN if not requested or not fired.
  double compare_time = 0.0;
};

BlowupResult scenario_blowup_baseline(const RunConfig& cfg);
SweepResult scenario_suppression_sweep(const RunConfig& cfg);
SweepResult scenario_relaxation_rate(const RunConfig& cfg);

struct ApproximationRow {
  double amplitude = 0.0;
  double window = 0.0;
  double sup_distance = 0.0;
};
std::vector<ApproximationRow> scenario_approximation_check(const RunConfig& cfg);

struct MixingTarget {
  double epsilon = 0.0;
  /// NaN if the target was not reached.
  double time = 0.0;
  int level = 0;
  /// Level actually evaluated, capped by the grid.
  int level_used = 0;
  double mixedness = 0.0;
  double duality_ratio = 0.0;
};

struct MixingBenchResult {
  std::vector<MixingTarget> targets;
  /// (t, hm1, mixedness) after every transport step, starting at t = 0.
  std::vector<std::array<double, 3>> trace;
  /// hm1 at t = 0 and at each stage boundary.
  std::vector<std::pair<double, double>> stage_hm1;
  int trace_level = 0;
  double f0_linf = 0.0;
};
MixingBenchResult scenario_mixing_bench(const RunConfig& cfg);

struct IneqRow {
  InequalitySpec spec;
  int n = 0;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  bool finite = true;
};

struct IneqSuiteResult {
  std::vector<IneqRow> rows;
  /// Largest relative change of any ratio under f -> lambda f.
  double homogeneity_error = 0.0;
};

/// The inequality family evaluated by the suite.
std::vector<InequalitySpec> standard_inequalities();
IneqSuiteResult scenario_ineq_suite(const RunConfig& cfg);

/// Runs the configured scenario and assembles verdicts and files.
ScenarioReport run_scenario(const RunConfig& cfg);

}  // namespace ksmix
