#pragma once

#include <stdexcept>
#include <string>

#include "ksmix/field.hpp"

namespace ksmix {

/// Raised when a field stops being finite during time stepping.
class NumericalOverflow : public std::runtime_error {
 public:
  NumericalOverflow() : std::runtime_error("numerical overflow (possible blow-up)") {}
  explicit NumericalOverflow(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a requested step exceeds the admissible timestep.
class CflViolation : public InvalidArgument {
 public:
  CflViolation(double requested, double admissible);
  double requested;
  double admissible;
};

struct StepperConfig {
  double dt_max = 1e-3;
  double cfl = 0.5;
  double dealias_fraction = 2.0 / 3.0;
  /// Relative tolerance for negative initial values.
  double negative_tolerance = 1e-8;
  double hyperdiffusion_for_transport = 0.0;
  /// Disables the aggregation term, leaving advection-diffusion.
  bool chemotaxis = true;
  /// Steps of the adaptive driver also satisfy dt * max(rho) <= cfl.
  bool reaction_limit = true;
  /// Transport steps satisfy Lip(u) * dt <= transport_cfl.
  double transport_cfl = 0.25;

  void validate() const;
  bool operator==(const StepperConfig&) const = default;
};

struct SimState {
  double t = 0.0;
  ScalarField rho;
  SpectralCoeffs rho_hat;
  double criterion_integral = 0.0;
  double mean = 0.0;
  double last_dt = 0.0;
};

/// State at time t0 with the spectral cache filled and mean fixed.
SimState make_state(const ScalarField& rho0, double t0 = 0.0);

}  // namespace ksmix
