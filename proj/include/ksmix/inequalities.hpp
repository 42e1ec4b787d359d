#pragma once

#include <string>

#include "ksmix/field.hpp"

namespace ksmix {

enum class InequalityKind { GN14, NASH16, GN66, SOBEASY };

/// Selects one multiplicative inequality and its exponents.
struct InequalitySpec {
  InequalityKind kind = InequalityKind::GN14;
  int m = 0;
  double p = 2.0;
  int n_ord = 1;
  double s = 1.0;
  double q = 3.0;
  double r = 2.0;
};

/// ||D^m f||_p <= C ||f||_2^(1-a) ||f||_{H^n}^a, a = (m - d/p + d/2)/n. p may be infinity.
InequalitySpec gagliardo_nirenberg(int m, double p, int n_ord);
/// ||f||_{H^s} <= C ||f||_{H^(s+1)}^((2s+d)/(2s+2+d)) ||f||_1^(2/(2s+2+d)).
InequalitySpec nash(double s);
/// ||v||_q <= C ||grad v||_2^a ||v||_r^(1-a), a = (1/r - 1/q)/(1/d - 1/2 + 1/r).
InequalitySpec gn_vanishing(double q, double r);
/// ||f||_{H^s} <= ||f - mean||_2^(1/(s+1)) ||f||_{H^(s+1)}^(s/(s+1)).
InequalitySpec sobolev_interpolation(double s);

std::string describe(const InequalitySpec& spec);

/// Interpolation exponent a for the given dimension.
double interpolation_exponent(const InequalitySpec& spec, int dim);

/// Throws InvalidArgument naming the violated constraint.
void check_admissible(const InequalitySpec& spec, int dim);

/// Left side over the constant-free right side. GN14 maximizes over
/// coordinate directions of D^m. Homogeneous norms use the PAPER convention
/// except the gradient in GN66, which is the physical one. A zero field gives 0.
double inequality_ratio(const ScalarField& f, const InequalitySpec& spec);

}  // namespace ksmix
