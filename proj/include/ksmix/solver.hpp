#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ksmix/diagnostics.hpp"
#include "ksmix/flows.hpp"
#include "ksmix/state.hpp"

namespace ksmix {

/// Largest dt accepted by ks_step for this state and flow.
double admissible_dt(const SimState& state, const FlowSpec& flow, const StepperConfig& cfg);

/// One integrating-factor midpoint step of the advected Keller-Segel equation.
/// Throws CflViolation if dt exceeds admissible_dt and NumericalOverflow if the
/// result is not finite.
SimState ks_step(const SimState& state, const FlowSpec& flow, double dt, const StepperConfig& cfg);

/// Semi-Lagrangian step of pure transport from t to t + dt: RK4 backward
/// characteristics and periodic cubic interpolation. Steps crossing a flow
/// switch are split at the switch.
ScalarField transport_step(const ScalarField& f, const FlowSpec& flow, double t, double dt);

struct FlowMapResult {
  Point position;
  /// Unwrapped displacement x(t1) - x(t0).
  Point displacement;
};

/// RK4 integration of dx/dt = u(x, t) from t0 to t1 with substeps <= dt.
/// t1 < t0 integrates backward and inverts the forward map.
FlowMapResult flow_map(const FlowSpec& flow, const Point& x, double t0, double t1, double dt);

enum class Termination { COMPLETED, BLOWUP_DETECTED, OVERFLOW };

std::string to_string(Termination t);

struct RunOptions {
  int diag_stride = 1;
  /// Radius of the low-mode projection reported as pn_low.
  int pn_radius = 1;
  DetectorConfig detector;
  /// Stop as soon as the detector fires.
  bool stop_on_detect = true;
  /// Called with the state behind every stored record.
  std::function<void(const SimState&)> observer;
};

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  SimState final_state;
  Termination termination = Termination::COMPLETED;
  DetectorClause clause = DetectorClause::NONE;
  std::size_t steps = 0;
  /// Largest l2_dev over every step, including those not stored.
  double sup_l2_dev = 0.0;
};

/// Adaptive-step run to time T. Records are stored every diag_stride steps and
/// always at the first and last state.
RunResult run_simulation(const ScalarField& rho0, const FlowSpec& flow, double T, const StepperConfig& cfg,
                         const RunOptions& opts = {});

struct PairedResult {
  std::vector<std::pair<double, double>> distances;
  double sup_distance = 0.0;
};

/// Co-evolves the full equation and pure transport from rho0 and reports
/// ||rho - eta||_L2 at `samples` evenly spaced times in (0, t_window].
PairedResult paired_run(const ScalarField& rho0, const FlowSpec& flow, double t_window, const StepperConfig& cfg,
                        int samples = 32);

}  // namespace ksmix
