#include "ksmix/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "records.hpp"
#include "ksmix/spectral.hpp"

namespace ksmix {

using detail::cplx;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sinc(double z) { return z == 0.0 ? 1.0 : std::sin(z) / z; }

}  // namespace

namespace detail {

DiagnosticsRecord record_from_half(const Grid& grid, const std::vector<cplx>& half,
                                   const std::vector<double>& phys, int N) {
  const ModeTable& t = mode_table(grid);
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  const double nsq = static_cast<double>(N) * N;
  const double tail_sq = (grid.n / 3.0) * (grid.n / 3.0);
  double l2 = 0.0, h1p = 0.0, hm1 = 0.0, low = 0.0, tail = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double e = t.weight[i] * std::norm(half[i]) * inv_n * inv_n;
    const double ksq = t.ksq[i];
    if (ksq == 0.0) continue;
    l2 += e;
    h1p += ksq * e;
    hm1 += e / ksq;
    if (ksq <= nsq) low += e;
    if (ksq > tail_sq) tail += e;
  }
  DiagnosticsRecord r;
  const double mean = half[0].real() * inv_n;
  r.mass = std::accumulate(phys.begin(), phys.end(), 0.0) * inv_n;
  r.l2_dev = std::sqrt(l2);
  r.h1_paper = std::sqrt(h1p);
  r.h1 = kTwoPi * r.h1_paper;
  r.hm1 = std::sqrt(hm1);
  r.pn_low = std::sqrt(low);
  r.tail_fraction = l2 > 0.0 ? tail / l2 : 0.0;
  double lo = phys.empty() ? 0.0 : phys[0];
  double dev = 0.0;
  for (double v : phys) {
    lo = std::min(lo, v);
    dev = std::max(dev, std::abs(v - mean));
  }
  r.min_val = lo;
  r.linf_dev = dev;
  return r;
}

}  // namespace detail

DiagnosticsRecord record(const SimState& state, int N) {
  if (N < 0) throw InvalidArgument("projection radius must be nonnegative");
  require_same_grid(state.rho.grid(), state.rho_hat.grid, "record");
  DiagnosticsRecord r = detail::record_from_half(state.rho.grid(), detail::full_to_half(state.rho_hat),
                                                 state.rho.values(), N);
  r.t = state.t;
  r.criterion_integral = state.criterion_integral;
  r.dt_used = state.last_dt;
  return r;
}

void ThresholdParams::validate() const {
  if (d != 2 && d != 3) throw InvalidArgument("threshold dimension must be 2 or 3");
  if (!(B > 0.0)) throw InvalidArgument("threshold B must be > 0");
  if (!(rho_bar >= 0.0)) throw InvalidArgument("threshold rho_bar must be >= 0");
  if (!(C0 > 0.0) || !(C1 > 0.0)) throw InvalidArgument("threshold constants must be > 0");
}

double b1_threshold(const ThresholdParams& p) {
  p.validate();
  const double e = (12.0 - 2.0 * p.d) / (4.0 - p.d);
  return std::sqrt(p.C0 * std::pow(p.B, e) + 2.0 * p.rho_bar * p.B * p.B);
}

double safe_window(const ThresholdParams& p) {
  p.validate();
  double w = 1.0;
  if (p.rho_bar > 0.0) w = std::min(w, 1.0 / p.rho_bar);
  w = std::min(w, std::pow(p.B, -4.0 / (4.0 - p.d)));
  return p.C1 * w;
}

DecayResidual decay_residual(const SimState& a, const SimState& b, const ThresholdParams& p) {
  const double dt = b.t - a.t;
  if (!(dt > 0.0)) throw InvalidArgument("decay_residual needs two states with increasing time");
  const DiagnosticsRecord ra = record(a, 0);
  const DiagnosticsRecord rb = record(b, 0);
  const double l2a = ra.l2_dev * ra.l2_dev;
  const double l2b = rb.l2_dev * rb.l2_dev;
  const double l2mid = 0.5 * (l2a + l2b);
  const double h1mid = 0.5 * (ra.h1 * ra.h1 + rb.h1 * rb.h1);
  DecayResidual out;
  out.residual = (l2b - l2a) / dt + h1mid - 2.0 * p.rho_bar * l2mid;
  const double l2 = std::sqrt(l2mid);
  if (l2 > 1e-12) {
    const double e = (12.0 - 2.0 * p.d) / (4.0 - p.d);
    out.c0_estimate = out.residual / std::pow(l2, e);
  }
  return out;
}

SecondMomentRate second_moment_rate(const ScalarField& rho, const ScalarField& phi, double rho_bar) {
  const Grid& g = rho.grid();
  if (g.dim != 2) throw InvalidArgument("second_moment_rate is defined in 2D only");
  require_same_grid(g, phi.grid(), "second_moment_rate");
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Point x = rho.node(i);
    w[i] = (x[0] * x[0] + x[1] * x[1]) * phi[i];
  }
  const SpectralCoeffs w_hat = to_spectral(ScalarField(g, w));
  const ScalarField lap_w = to_physical(spectral_laplacian(w_hat));
  const std::vector<SpectralCoeffs> grad_w_hat = spectral_gradient(w_hat);
  const double mean = rho.mean();
  if (std::abs(rho_bar - mean) > 1e-8 * std::max(1.0, std::abs(mean))) {
    throw InvalidArgument("rho_bar does not match the field mean");
  }
  const std::vector<SpectralCoeffs> grad_c_hat = spectral_gradient(invert_laplacian(to_spectral(rho)));
  std::vector<ScalarField> grad_w, grad_c;
  for (int a = 0; a < 2; ++a) {
    grad_w.push_back(to_physical(grad_w_hat[a]));
    grad_c.push_back(to_physical(grad_c_hat[a]));
  }
  const double inv_n = 1.0 / static_cast<double>(g.size());
  SecondMomentRate out;
  double rate = 0.0, moment = 0.0, mphi = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = rho[i];
    rate += r * lap_w[i] + r * (grad_c[0][i] * grad_w[0][i] + grad_c[1][i] * grad_w[1][i]);
    moment += r * w[i];
    mphi += r * phi[i];
  }
  out.rate = rate * inv_n;
  out.moment = moment * inv_n;
  out.localized_mass = mphi * inv_n;
  out.leading_term = -out.localized_mass * out.localized_mass / (2.0 * std::numbers::pi);
  return out;
}

MixingReport cell_mixedness(const ScalarField& f, int level) {
  const Grid& g = f.grid();
  if (g.dim != 2) throw InvalidArgument("cell_mixedness is defined in 2D only");
  if (level < 0 || (1 << level) > g.n / 4) {
    throw InvalidArgument("cell level " + std::to_string(level) + " is not aligned with grid n=" +
                          std::to_string(g.n) + " (need 2^level <= n/4)");
  }
  const int cells = 1 << level;
  const double L = 1.0 / cells;
  SpectralCoeffs c = to_spectral(f);
  const double mean = c.at(Wavevector{0, 0, 0}).real();
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
    const Wavevector k = c.wavevector(i);
    c.coeffs[i] *= sinc(std::numbers::pi * k[0] * L) * sinc(std::numbers::pi * k[1] * L);
  }
  const ScalarField avg = to_physical(c);
  MixingReport rep;
  rep.level = level;
  rep.cell_averages.resize(static_cast<std::size_t>(cells) * cells);
  const int stride = g.n / cells;
  double worst = 0.0;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const double v = avg.at(i * stride + stride / 2, j * stride + stride / 2);
      rep.cell_averages[static_cast<std::size_t>(i) * cells + j] = v;
      worst = std::max(worst, std::abs(v - mean));
    }
  }
  double dev = 0.0;
  for (double v : f.values()) dev = std::max(dev, std::abs(v - mean));
  rep.mixedness = dev > 0.0 ? worst / dev : 0.0;
  rep.hm1 = sobolev_norm(f, -1.0, NormConvention::PAPER);
  return rep;
}

DualityCheck duality_bound_check(const ScalarField& f, int level) {
  const double linf = lp_norm(f, std::numeric_limits<double>::infinity());
  if (std::abs(f.mean()) > 1e-10 * std::max(linf, 1e-300) && linf > 0.0) {
    throw InvalidArgument("duality_bound_check needs a mean-zero field");
  }
  const MixingReport rep = cell_mixedness(f, level);
  DualityCheck out;
  out.hm1 = rep.hm1;
  const double eps = std::max(std::ldexp(1.0, -level), rep.mixedness);
  out.bound_rhs = eps * linf;
  out.ratio = out.bound_rhs > 0.0 ? out.hm1 / out.bound_rhs : 0.0;
  return out;
}

LinfCheck linf_bound_check(const SimState& state, double B, double C4) {
  if (!(B > 0.0) || !(C4 > 0.0)) throw InvalidArgument("linf_bound_check needs B > 0 and C4 > 0");
  LinfCheck out;
  double dev = 0.0;
  for (double v : state.rho.values()) dev = std::max(dev, std::abs(v - state.mean));
  out.linf_dev = dev;
  out.bound = C4 * B * std::max(B, std::sqrt(std::max(state.mean, 0.0)));
  out.ok = out.linf_dev <= out.bound;
  return out;
}

std::string to_string(DetectorClause c) {
  switch (c) {
    case DetectorClause::NONE: return "none";
    case DetectorClause::CRITERION: return "criterion_integral";
    case DetectorClause::H1: return "h1";
    case DetectorClause::TAIL: return "spectral_tail";
    case DetectorClause::NEGATIVITY: return "negativity";
  }
  return "unknown";
}

DetectorResult blowup_detect(const std::vector<DiagnosticsRecord>& history, const DetectorConfig& cfg) {
  if (history.size() < 2) throw InvalidArgument("blowup_detect needs at least two records");
  const DiagnosticsRecord& r = history.back();
  DetectorResult out;
  if (r.criterion_integral > cfg.criterion_cap) {
    out.clause = DetectorClause::CRITERION;
  } else if (r.h1 > cfg.h1_cap) {
    out.clause = DetectorClause::H1;
  } else if (r.tail_fraction > cfg.tail_cap) {
    out.clause = DetectorClause::TAIL;
  } else if (r.min_val < -cfg.neg_cap * (std::abs(r.mass) + r.linf_dev)) {
    out.clause = DetectorClause::NEGATIVITY;
  }
  out.fired = out.clause != DetectorClause::NONE;
  return out;
}

MoserReport moser_linf_iterate(const SimState& state, int levels, const MoserConstants& k) {
  if (levels < 1 || levels > 6) throw InvalidArgument("Moser levels must lie in [1, 6]");
  if (!(k.B > 0.0) || !(k.C >= 1.0)) throw InvalidArgument("Moser constants need B > 0 and C >= 1");
  MoserReport rep;
  std::vector<double> dev(state.rho.values());
  for (double& v : dev) v -= state.mean;
  const ScalarField d(state.rho.grid(), std::move(dev));
  for (int j = 1; j <= levels; ++j) rep.norms.push_back(lp_norm(d, std::ldexp(1.0, j)));
  double log_u = std::log(std::max(2.0 * k.B, 1.0));
  rep.caps.push_back(std::exp(log_u));
  const double log_rho = std::max(std::log(std::max(state.mean, 1e-300)), 0.0);
  for (int j = 1; j < levels; ++j) {
    const double p = std::ldexp(1.0, j + 1);
    const double tail = ((j + 1) * std::log(2.0) + std::log(k.C)) / p;
    const double gamma = (p - 1.0) / (p - 2.0) * log_u + tail;
    const double theta = log_u + tail + log_rho / p;
    log_u = std::max(gamma, theta);
    rep.caps.push_back(std::exp(log_u));
  }
  return rep;
}

}  // namespace ksmix
