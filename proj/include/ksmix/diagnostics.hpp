#pragma once

#include <string>
#include <vector>

#include "ksmix/state.hpp"

namespace ksmix {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double l2_dev = 0.0;
  double h1 = 0.0;
  double h1_paper = 0.0;
  double hm1 = 0.0;
  double linf_dev = 0.0;
  double min_val = 0.0;
  double pn_low = 0.0;
  double criterion_integral = 0.0;
  double dt_used = 0.0;
  /// Share of deviation energy in modes with |k| > n/3. Not serialized.
  double tail_fraction = 0.0;
};

/// All monitored functionals of a state; pn_low is the L2 norm of P_N(rho - mean).
DiagnosticsRecord record(const SimState& state, int N);

struct ThresholdParams {
  double B = 1.0;
  double rho_bar = 1.0;
  double C0 = 1.0;
  double C1 = 1.0;
  int d = 2;
  void validate() const;
};

/// sqrt(C0 B^((12-2d)/(4-d)) + 2 rho_bar B^2).
double b1_threshold(const ThresholdParams& p);

/// C1 min(1, 1/rho_bar, B^(-4/(4-d))).
double safe_window(const ThresholdParams& p);

struct DecayResidual {
  double residual = 0.0;
  double c0_estimate = 0.0;
};

/// Finite-difference residual of the L2 energy inequality between two states.
DecayResidual decay_residual(const SimState& a, const SimState& b, const ThresholdParams& p);

struct SecondMomentRate {
  double rate = 0.0;
  double leading_term = 0.0;
  /// Integral of |x|^2 rho phi.
  double moment = 0.0;
  /// Integral of rho phi.
  double localized_mass = 0.0;
};

/// Exact time derivative of the localized second moment for the flow-free equation. 2D only.
SecondMomentRate second_moment_rate(const ScalarField& rho, const ScalarField& phi, double rho_bar);

struct MixingReport {
  int level = 0;
  /// Row-major 2^level x 2^level cell averages, row index along x.
  std::vector<double> cell_averages;
  double mixedness = 0.0;
  double hm1 = 0.0;
};

/// Exact dyadic cell averages. 2D; requires 2^level <= n/4.
MixingReport cell_mixedness(const ScalarField& f, int level);

struct DualityCheck {
  double hm1 = 0.0;
  double bound_rhs = 0.0;
  double ratio = 0.0;
};

/// Negative-norm mixing bound with eps_eff = max(2^-level, mixedness).
DualityCheck duality_bound_check(const ScalarField& f, int level);

struct LinfCheck {
  double linf_dev = 0.0;
  double bound = 0.0;
  bool ok = false;
};

LinfCheck linf_bound_check(const SimState& state, double B, double C4 = 10.0);

struct DetectorConfig {
  double criterion_cap = 1e4;
  double h1_cap = 1e6;
  double tail_cap = 0.1;
  double neg_cap = 1e-3;

  bool operator==(const DetectorConfig&) const = default;
};

enum class DetectorClause { NONE, CRITERION, H1, TAIL, NEGATIVITY };

std::string to_string(DetectorClause c);

struct DetectorResult {
  bool fired = false;
  DetectorClause clause = DetectorClause::NONE;
};

/// Inspects the latest record of the history; requires at least two records.
DetectorResult blowup_detect(const std::vector<DiagnosticsRecord>& history, const DetectorConfig& cfg);

struct MoserReport {
  /// ||rho - mean||_{L^(2^j)} for j = 1..levels.
  std::vector<double> norms;
  /// Iteration caps for the same j.
  std::vector<double> caps;
};

/// Constants for the L^p iteration caps.
struct MoserConstants {
  double B = 1.0;
  double C = 1.0;
};

MoserReport moser_linf_iterate(const SimState& state, int levels, const MoserConstants& k = {});

}  // namespace ksmix
