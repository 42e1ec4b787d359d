#include "ksmix/flows.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>

#include "hash.hpp"

namespace ksmix {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_dim(int dim) {
  if (dim != 2 && dim != 3) {
    throw InvalidArgument("unsupported dimension " + std::to_string(dim) + " (only 2 and 3)");
  }
}

// Index j of the closed-left interval [j T, (j+1) T) containing t.
long interval_index(double t, double period) {
  long j = static_cast<long>(std::floor(t / period));
  if (static_cast<double>(j + 1) * period <= t) ++j;
  if (static_cast<double>(j) * period > t) --j;
  return j;
}

double shear_phase(std::uint64_t seed, long j, int which) {
  if (seed == 0) return 0.0;
  const std::uint64_t h = detail::hash_combine(detail::hash_combine(seed, static_cast<std::uint64_t>(j)),
                                               static_cast<std::uint64_t>(which));
  return kTwoPi * detail::unit_open(h);
}

// Unit cellular modes at wavenumber m, with the cell pattern translated by s along both axes.
void cellular_modes(int m, double scale, double s, std::vector<FlowMode>& out) {
  const double shift = -kTwoPi * m * s;
  FlowMode a;
  a.k = {m, m, 0};
  a.amp = {0.5 * scale, -0.5 * scale, 0.0};
  a.phase = -0.5 * kPi + 2.0 * shift;
  FlowMode b;
  b.k = {m, -m, 0};
  b.amp = {0.5 * scale, 0.5 * scale, 0.0};
  b.phase = -0.5 * kPi;
  out.push_back(a);
  out.push_back(b);
}

double kdot(const Wavevector& k, const Point& x, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += k[a] * x[a];
  return s;
}

double op_norm(const Matrix3& J, int dim) {
  if (dim == 2) {
    const double f = J[0][0] * J[0][0] + J[0][1] * J[0][1] + J[1][0] * J[1][0] + J[1][1] * J[1][1];
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    const double disc = std::max(0.0, f * f - 4.0 * det * det);
    return std::sqrt(0.5 * (f + std::sqrt(disc)));
  }
  Eigen::Matrix3d m;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m(a, b) = J[a][b];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.transpose() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// cos and sin of (2 pi k x_i + phase) at every node coordinate of one axis.
void axis_table(int k, double phase, const Grid& g, std::vector<double>& c, std::vector<double>& s) {
  c.resize(g.n);
  s.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double th = kTwoPi * k * g.coordinate(i) + phase;
    c[i] = std::cos(th);
    s[i] = std::sin(th);
  }
}

// Calls fn(idx, cos(theta), sin(theta)) for every grid node, theta = 2 pi k.x + phase.
template <class Fn>
void for_each_node(const FlowMode& mode, const Grid& g, Fn fn) {
  std::vector<double> c0, s0, c1, s1, c2, s2;
  axis_table(mode.k[0], mode.phase, g, c0, s0);
  axis_table(mode.k[1], 0.0, g, c1, s1);
  const std::size_t n = static_cast<std::size_t>(g.n);
  if (g.dim == 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        fn(i * n + j, c0[i] * c1[j] - s0[i] * s1[j], s0[i] * c1[j] + c0[i] * s1[j]);
    return;
  }
  axis_table(mode.k[2], 0.0, g, c2, s2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double cij = c0[i] * c1[j] - s0[i] * s1[j];
      const double sij = s0[i] * c1[j] + c0[i] * s1[j];
      const std::size_t base = (i * n + j) * n;
      for (std::size_t k = 0; k < n; ++k) fn(base + k, cij * c2[k] - sij * s2[k], sij * c2[k] + cij * s2[k]);
    }
}

}  // namespace

std::string to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::ZERO: return "zero";
    case FlowKind::UNIFORM: return "uniform";
    case FlowKind::SHEAR_ALTERNATING: return "shear";
    case FlowKind::CELLULAR: return "cellular";
    case FlowKind::MULTISCALE_MIXER: return "mixer";
    case FlowKind::MOLLIFIED: return "mollified";
    case FlowKind::SCALED: return "scaled";
  }
  return "unknown";
}

FlowSpec make_zero_flow(int dim) {
  check_dim(dim);
  FlowSpec f;
  f.kind = FlowKind::ZERO;
  f.dim = dim;
  return f;
}

FlowSpec make_uniform_flow(int dim, const Point& v) {
  check_dim(dim);
  FlowSpec f;
  f.kind = FlowKind::UNIFORM;
  f.dim = dim;
  for (int a = 0; a < dim; ++a) {
    if (!std::isfinite(v[a])) throw InvalidArgument("uniform velocity must be finite");
    f.velocity[a] = v[a];
  }
  return f;
}

FlowSpec make_shear_alternating(int m, double T_sw, std::uint64_t phase_seed, int dim) {
  check_dim(dim);
  if (m < 1) throw InvalidArgument("shear wavenumber m must be >= 1");
  if (!(T_sw > 0.0) || !std::isfinite(T_sw)) throw InvalidArgument("switching time T_sw must be > 0");
  FlowSpec f;
  f.kind = FlowKind::SHEAR_ALTERNATING;
  f.dim = dim;
  f.m = m;
  f.switch_time = T_sw;
  f.phase_seed = phase_seed;
  f.declared_lipschitz = kTwoPi * m;
  return f;
}

FlowSpec make_cellular(int m, int dim) {
  if (dim != 2) throw InvalidArgument("cellular flow is defined in 2D only");
  if (m < 1) throw InvalidArgument("cellular wavenumber m must be >= 1");
  FlowSpec f;
  f.kind = FlowKind::CELLULAR;
  f.dim = 2;
  f.m = m;
  f.declared_lipschitz = kTwoPi * m;
  return f;
}

FlowSpec make_multiscale_mixer(int levels, double per_level_time, const Grid& grid) {
  if (grid.dim != 2) throw InvalidArgument("multiscale mixer is defined in 2D only");
  if (levels < 1) throw InvalidArgument("mixer levels must be >= 1");
  if (!(per_level_time > 0.0) || !std::isfinite(per_level_time)) {
    throw InvalidArgument("per_level_time must be > 0");
  }
  if ((grid.n >> levels) < 8) {
    throw InvalidArgument("mixer level " + std::to_string(levels) + " has cells thinner than 8 points at n=" +
                          std::to_string(grid.n));
  }
  FlowSpec f;
  f.kind = FlowKind::MULTISCALE_MIXER;
  f.dim = 2;
  f.levels = levels;
  f.per_level_time = per_level_time;
  f.declared_lipschitz = 1.0;
  return f;
}

double mollifier_transform(double kabs, double delta, int dim) {
  const double mu = 4.0 + 0.5 * dim;
  const double z = kTwoPi * kabs * delta;
  if (z < 1e-3) {
    const double z2 = 0.25 * z * z;
    return 1.0 - z2 / (mu + 1.0) + z2 * z2 / (2.0 * (mu + 1.0) * (mu + 2.0));
  }
  return std::tgamma(mu + 1.0) * std::pow(2.0 / z, mu) * std::cyl_bessel_j(mu, z);
}

FlowSpec mollify(const FlowSpec& flow, double delta) {
  if (!(delta > 0.0 && delta < 0.25)) throw InvalidArgument("mollification radius must lie in (0, 1/4)");
  FlowSpec f;
  f.kind = FlowKind::MOLLIFIED;
  f.dim = flow.dim;
  f.delta = delta;
  f.inner = std::make_shared<const FlowSpec>(flow);
  f.declared_lipschitz = flow.declared_lipschitz;
  return f;
}

FlowSpec scale_amplitude(const FlowSpec& flow, double A) {
  if (!(A >= 0.0) || !std::isfinite(A)) throw InvalidArgument("amplitude must be finite and >= 0");
  FlowSpec f;
  f.kind = FlowKind::SCALED;
  f.dim = flow.dim;
  if (flow.kind == FlowKind::SCALED) {
    f.amplitude = flow.amplitude * A;
    f.inner = flow.inner;
    f.declared_lipschitz = flow.inner->declared_lipschitz * f.amplitude;
  } else {
    f.amplitude = A;
    f.inner = std::make_shared<const FlowSpec>(flow);
    f.declared_lipschitz = flow.declared_lipschitz * A;
  }
  return f;
}

std::vector<FlowMode> active_modes(const FlowSpec& flow, double t) {
  std::vector<FlowMode> out;
  switch (flow.kind) {
    case FlowKind::ZERO:
      break;
    case FlowKind::UNIFORM: {
      FlowMode md;
      md.amp = flow.velocity;
      out.push_back(md);
      break;
    }
    case FlowKind::SHEAR_ALTERNATING: {
      const long j = interval_index(t, flow.switch_time);
      const int cycle = flow.dim == 2 ? static_cast<int>(((j % 2) + 2) % 2) : static_cast<int>(((j % 3) + 3) % 3);
      // velocity axis and the transverse axis it depends on
      const int along = cycle;
      const int across = flow.dim == 2 ? 1 - cycle : (cycle + 1) % 3;
      FlowMode md;
      md.k[across] = flow.m;
      md.amp[along] = 1.0;
      md.phase = shear_phase(flow.phase_seed, j, cycle) - 0.5 * kPi;
      out.push_back(md);
      break;
    }
    case FlowKind::CELLULAR:
      cellular_modes(flow.m, 1.0, 0.0, out);
      break;
    case FlowKind::MULTISCALE_MIXER: {
      const double half = 0.5 * flow.per_level_time;
      const long j = interval_index(t, half);
      const long within = ((j % (2L * flow.levels)) + 2L * flow.levels) % (2L * flow.levels);
      const int stage = static_cast<int>(within / 2) + 1;
      const bool shifted = (within % 2) == 1;
      const int m = 1 << (stage - 1);
      const double cell = 1.0 / (2.0 * m);
      cellular_modes(m, 1.0 / (kTwoPi * m), shifted ? 0.5 * cell : 0.0, out);
      break;
    }
    case FlowKind::MOLLIFIED: {
      out = active_modes(*flow.inner, t);
      for (FlowMode& md : out) {
        double ksq = 0.0;
        for (int a = 0; a < flow.dim; ++a) ksq += static_cast<double>(md.k[a]) * md.k[a];
        const double w = mollifier_transform(std::sqrt(ksq), flow.delta, flow.dim);
        for (double& v : md.amp) v *= w;
      }
      break;
    }
    case FlowKind::SCALED: {
      out = active_modes(*flow.inner, t);
      for (FlowMode& md : out)
        for (double& v : md.amp) v *= flow.amplitude;
      break;
    }
  }
  return out;
}

double next_switch_after(const FlowSpec& flow, double t) {
  switch (flow.kind) {
    case FlowKind::SHEAR_ALTERNATING:
      return static_cast<double>(interval_index(t, flow.switch_time) + 1) * flow.switch_time;
    case FlowKind::MULTISCALE_MIXER: {
      const double half = 0.5 * flow.per_level_time;
      return static_cast<double>(interval_index(t, half) + 1) * half;
    }
    case FlowKind::MOLLIFIED:
    case FlowKind::SCALED:
      return next_switch_after(*flow.inner, t);
    default:
      return std::numeric_limits<double>::infinity();
  }
}

double previous_switch_before(const FlowSpec& flow, double t) {
  auto prev = [t](double period) {
    const long j = interval_index(t, period);
    const double start = static_cast<double>(j) * period;
    return start < t ? start : static_cast<double>(j - 1) * period;
  };
  switch (flow.kind) {
    case FlowKind::SHEAR_ALTERNATING:
      return prev(flow.switch_time);
    case FlowKind::MULTISCALE_MIXER:
      return prev(0.5 * flow.per_level_time);
    case FlowKind::MOLLIFIED:
    case FlowKind::SCALED:
      return previous_switch_before(*flow.inner, t);
    default:
      return -std::numeric_limits<double>::infinity();
  }
}

Point evaluate_modes(const std::vector<FlowMode>& modes, const Point& x) {
  Point u{0.0, 0.0, 0.0};
  for (const FlowMode& md : modes) {
    const double c = std::cos(kTwoPi * (md.k[0] * x[0] + md.k[1] * x[1] + md.k[2] * x[2]) + md.phase);
    for (int a = 0; a < 3; ++a) u[a] += md.amp[a] * c;
  }
  return u;
}

Point evaluate(const FlowSpec& flow, const Point& x, double t) {
  Point xx = x;
  for (int a = flow.dim; a < 3; ++a) xx[a] = 0.0;
  Point u = evaluate_modes(active_modes(flow, t), xx);
  for (int a = flow.dim; a < 3; ++a) u[a] = 0.0;
  return u;
}

Matrix3 velocity_gradient(const FlowSpec& flow, const Point& x, double t) {
  Matrix3 J{};
  for (const FlowMode& md : active_modes(flow, t)) {
    const double s = std::sin(kTwoPi * kdot(md.k, x, flow.dim) + md.phase);
    for (int a = 0; a < flow.dim; ++a)
      for (int b = 0; b < flow.dim; ++b) J[a][b] -= md.amp[a] * kTwoPi * md.k[b] * s;
  }
  return J;
}

void sample_velocity(const std::vector<FlowMode>& modes, const Grid& grid,
                     std::array<std::vector<double>, 3>& out) {
  for (int a = 0; a < 3; ++a) out[a].assign(a < grid.dim ? grid.size() : 0, 0.0);
  for (const FlowMode& md : modes) {
    if (md.k[0] == 0 && md.k[1] == 0 && md.k[2] == 0) {
      const double c = std::cos(md.phase);
      for (int a = 0; a < grid.dim; ++a)
        for (double& v : out[a]) v += md.amp[a] * c;
      continue;
    }
    const double a0 = md.amp[0], a1 = md.amp[1], a2 = md.amp[2];
    double* u0 = out[0].data();
    double* u1 = out[1].data();
    double* u2 = grid.dim == 3 ? out[2].data() : nullptr;
    for_each_node(md, grid, [&](std::size_t i, double c, double) {
      u0[i] += a0 * c;
      u1[i] += a1 * c;
      if (u2) u2[i] += a2 * c;
    });
  }
}

std::vector<ScalarField> velocity_on_grid(const FlowSpec& flow, double t, const Grid& grid) {
  if (flow.dim != grid.dim) throw InvalidArgument("flow and grid dimensions differ");
  std::array<std::vector<double>, 3> u;
  sample_velocity(active_modes(flow, t), grid, u);
  std::vector<ScalarField> out;
  for (int a = 0; a < grid.dim; ++a) out.emplace_back(grid, std::move(u[a]));
  return out;
}

double lipschitz_seminorm(const FlowSpec& flow, double t, const Grid& grid) {
  if (flow.dim != grid.dim) throw InvalidArgument("flow and grid dimensions differ");
  const int d = grid.dim;
  std::vector<double> J(grid.size() * 9, 0.0);
  for (const FlowMode& md : active_modes(flow, t)) {
    if (md.k[0] == 0 && md.k[1] == 0 && md.k[2] == 0) continue;
    double coef[3][3];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) coef[a][b] = -md.amp[a] * kTwoPi * md.k[b];
    for_each_node(md, grid, [&](std::size_t i, double, double s) {
      double* Ji = &J[i * 9];
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) Ji[a * 3 + b] += coef[a][b] * s;
    });
  }
  double best = 0.0;
  Matrix3 M{};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) M[a][b] = J[i * 9 + a * 3 + b];
    best = std::max(best, op_norm(M, d));
  }
  return best;
}

double max_speed(const FlowSpec& flow, double t, const Grid& grid) {
  if (flow.dim != grid.dim) throw InvalidArgument("flow and grid dimensions differ");
  std::array<std::vector<double>, 3> u;
  sample_velocity(active_modes(flow, t), grid, u);
  double best = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < grid.dim; ++a) s += u[a][i] * u[a][i];
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

}  // namespace ksmix
