#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ksmix/field.hpp"

namespace ksmix {

enum class FlowKind { ZERO, UNIFORM, SHEAR_ALTERNATING, CELLULAR, MULTISCALE_MIXER, MOLLIFIED, SCALED };

std::string to_string(FlowKind kind);

/// One divergence-free Fourier mode: amp * cos(2 pi k.x + phase), with amp . k = 0.
struct FlowMode {
  Wavevector k{0, 0, 0};
  Point amp{0.0, 0.0, 0.0};
  double phase = 0.0;
};

/// Immutable description of a time-dependent incompressible velocity field.
///
/// Every kind is stationary between consecutive switch times, and switched
/// kinds use closed-left intervals [t_j, t_{j+1}).
struct FlowSpec {
  FlowKind kind = FlowKind::ZERO;
  int dim = 2;
  int m = 0;
  double switch_time = 0.0;
  std::uint64_t phase_seed = 0;
  int levels = 0;
  double per_level_time = 0.0;
  Point velocity{0.0, 0.0, 0.0};
  double delta = 0.0;
  double amplitude = 1.0;
  std::shared_ptr<const FlowSpec> inner;
  /// Upper bound on the spatial Lipschitz seminorm at every time.
  double declared_lipschitz = 0.0;
};

FlowSpec make_zero_flow(int dim = 2);

/// Spatially constant velocity v (stationary).
FlowSpec make_uniform_flow(int dim, const Point& v);

/// Alternating sine shears of wavenumber m switching every T_sw. Phases are
/// drawn from phase_seed per interval; phase_seed = 0 gives zero phases.
FlowSpec make_shear_alternating(int m, double T_sw, std::uint64_t phase_seed, int dim = 2);

/// Stationary 2D cellular flow with stream function sin(2 pi m x) sin(2 pi m y) / (2 pi m).
FlowSpec make_cellular(int m, int dim = 2);

/// Dyadic cellular mixer with unit Lipschitz bound. Stage s = 1..levels runs
/// 2^s x 2^s cells, aligned with the dyadic squares for the first half of the
/// stage and shifted diagonally by half a cell for the second half. The
/// schedule repeats with period levels * per_level_time. Rejects levels whose
/// cells would span fewer than 8 points of `grid`.
FlowSpec make_multiscale_mixer(int levels, double per_level_time, const Grid& grid);

/// Convolution with the unit-mass bump (1 - |x|^2/delta^2)^4 supported in B_delta.
FlowSpec mollify(const FlowSpec& flow, double delta);

/// Velocity multiplied by A >= 0.
FlowSpec scale_amplitude(const FlowSpec& flow, double A);

/// Normalized Fourier transform of the mollifier at |k| = kabs.
double mollifier_transform(double kabs, double delta, int dim);

/// Modes active at time t.
std::vector<FlowMode> active_modes(const FlowSpec& flow, double t);

/// First switch time strictly after t; infinity for stationary flows.
double next_switch_after(const FlowSpec& flow, double t);

/// Last switch time strictly before t; -infinity for stationary flows.
double previous_switch_before(const FlowSpec& flow, double t);

/// Velocity at x (any point; periodic) and time t.
Point evaluate(const FlowSpec& flow, const Point& x, double t);
Point evaluate_modes(const std::vector<FlowMode>& modes, const Point& x);

using Matrix3 = std::array<std::array<double, 3>, 3>;
/// J[a][b] = d u_a / d x_b.
Matrix3 velocity_gradient(const FlowSpec& flow, const Point& x, double t);

/// Velocity components sampled at every grid node; out[a] has grid.size() entries.
void sample_velocity(const std::vector<FlowMode>& modes, const Grid& grid,
                     std::array<std::vector<double>, 3>& out);
std::vector<ScalarField> velocity_on_grid(const FlowSpec& flow, double t, const Grid& grid);

/// Largest operator 2-norm of the velocity gradient over the grid nodes.
double lipschitz_seminorm(const FlowSpec& flow, double t, const Grid& grid);

/// Largest |u| over the grid nodes.
double max_speed(const FlowSpec& flow, double t, const Grid& grid);

}  // namespace ksmix
