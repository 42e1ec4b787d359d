#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ksmix/diagnostics.hpp"
#include "ksmix/flows.hpp"
#include "ksmix/state.hpp"

namespace ksmix {

/// Configuration error; the message names the offending line where there is one.
class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(const std::string& what) : InvalidArgument(what) {}
};

enum class Scenario {
  RUN,
  BLOWUP_BASELINE,
  SUPPRESSION_SWEEP,
  RELAXATION_RATE,
  APPROXIMATION_CHECK,
  MIXING_BENCH,
  INEQ_SUITE
};

std::string to_string(Scenario s);
/// Accepts the config names run, blowup, suppress, relax, approx, mixbench, ineq.
Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);

enum class InitialKind { GAUSSIAN, RANDOM, SINE, CONSTANT };

struct InitialConfig {
  InitialKind kind = InitialKind::GAUSSIAN;
  double mass = 60.0;
  double width = 0.03;
  Point center{0.0, 0.0, 0.0};
  /// Constant added to RANDOM, SINE and CONSTANT data.
  double background = 0.0;
  /// Peak deviation for RANDOM and SINE data.
  double amplitude = 1.0;
  double decay = 3.0;
  Wavevector mode{1, 0, 0};

  bool operator==(const InitialConfig&) const = default;
};

enum class FlowChoice { ZERO, UNIFORM, SHEAR, CELLULAR, MIXER };

struct FlowConfig {
  FlowChoice kind = FlowChoice::ZERO;
  int m = 1;
  double switch_time = 1e-4;
  std::uint64_t phase_seed = 0;
  int levels = 4;
  double per_level_time = 10.0;
  std::vector<double> velocity{1.0, 0.0};
  /// Mollification radius; 0 leaves the flow unchanged.
  double mollify = 0.0;

  bool operator==(const FlowConfig&) const = default;
};

struct ScenarioConfig {
  Scenario name = Scenario::RUN;
  std::vector<double> amplitudes;
  /// Unset: 5x the zero-flow detection time for sweeps, 0.01 otherwise.
  std::optional<double> horizon;
  /// Unset: ||rho0 - mean||_L2.
  std::optional<double> B;
  double C0 = 1.0;
  double C1 = 1.0;
  double baseline_factor = 5.0;
  double baseline_horizon = 0.01;
  std::string output = "out";
  std::uint64_t seed = 1;
  int diag_stride = 1;
  int pn_radius = 1;
  /// Start of the decay-rate fit window; unset means a tenth of the horizon.
  std::optional<double> relax_delta;
  /// Flow-time budget; each amplitude A runs for window / A.
  std::optional<double> window;
  int samples = 32;
  /// Radius of the cutoff used for the localized second moment.
  double cutoff_radius = 0.25;
  /// Second resolution for the detection-time refinement check; 0 disables it.
  int compare_resolution = 0;
  int ensemble = 1000;
  std::vector<int> resolutions;
  std::vector<double> eps_targets{0.5, 0.35, 0.25, 0.18};
  bool snapshots = true;

  bool operator==(const ScenarioConfig&) const = default;
};

struct RunConfig {
  int dim = 2;
  int n = 128;
  InitialConfig initial;
  FlowConfig flow;
  StepperConfig stepper;
  DetectorConfig detector;
  ScenarioConfig scenario;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the [section] / key = value format. Throws ConfigError.
RunConfig parse_config(const std::string& text);

/// Text that parse_config maps back to an equal RunConfig.
std::string serialize_config(const RunConfig& cfg);

/// Documented defaults, one "section.key = value" per line.
std::string config_reference();

/// Checks cross-field constraints; throws ConfigError.
void validate_config(const RunConfig& cfg);

Grid config_grid(const RunConfig& cfg);
ScalarField build_initial(const RunConfig& cfg, const Grid& grid);
/// Unscaled flow for the configured kind.
FlowSpec build_flow(const RunConfig& cfg, const Grid& grid);

}  // namespace ksmix
