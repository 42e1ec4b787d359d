#pragma once

#include <cstdint>

#include "ksmix/field.hpp"

namespace ksmix {

/// Parameter choice for the concentrated-mass blow-up argument.
struct BlowupRecipe {
  double M = 0.0;
  double a = 0.0;
  double b = 0.0;
  double tau = 0.0;
  double C1 = 1.0, C2 = 1.0, C3 = 1.0, C4 = 1.0;
};

/// Periodized Gaussian exp(-|x-c|^2 / (2 a^2)) rescaled to quadrature mass M.
/// Rejects a below three grid spacings.
ScalarField gaussian_bump(const Grid& grid, double M, double a, const Point& center);

/// Smooth radial profile: 1 for r <= b, 0 for r >= 2b, strictly decreasing in between.
double cutoff_profile(double r, double b);

/// cutoff_profile(|x|, b) with x the representative in [-1/2, 1/2)^dim.
/// Rejects b below four grid spacings or above 1/4.
ScalarField radial_cutoff(const Grid& grid, double b);

/// Mean-zero field with coefficients z(k) / |k|^decay on 0 < |k| <= n/3, z(k)
/// standard complex Gaussian keyed by (seed, k) only, so the same seed gives
/// the same low modes at every resolution. Requires decay > dim/2 + 1.
ScalarField random_smooth_field(const Grid& grid, std::uint64_t seed, double decay);

/// b = min(1/4, 0.001/C3); M = max(1000 C4, 1 + 1e-6);
/// a = min(b/2, b/(10 sqrt(2 C1)), b/(100 sqrt(C2))); tau = 100 a^2 / M.
BlowupRecipe blowup_parameters(double C1, double C2, double C3, double C4);

}  // namespace ksmix
