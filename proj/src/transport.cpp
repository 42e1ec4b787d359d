#include <algorithm>
#include <cmath>
#include <limits>

#include "ksmix/solver.hpp"

namespace ksmix {

namespace {

// Periodic cubic Lagrange weights for nodes at offsets -1, 0, 1, 2.
void cubic_weights(double a, double w[4]) {
  w[0] = -a * (a - 1.0) * (a - 2.0) / 6.0;
  w[1] = (a + 1.0) * (a - 1.0) * (a - 2.0) / 2.0;
  w[2] = -(a + 1.0) * a * (a - 2.0) / 2.0;
  w[3] = (a + 1.0) * a * (a - 1.0) / 6.0;
}

void stencil(double x, int n, int idx[4], double w[4]) {
  const double g = (x + 0.5) * n;
  const double fl = std::floor(g);
  cubic_weights(g - fl, w);
  const int i0 = static_cast<int>(fl);
  for (int o = 0; o < 4; ++o) idx[o] = storage_index(i0 - 1 + o, n);
}

double interpolate(const std::vector<double>& v, const Grid& g, const Point& x) {
  const int n = g.n;
  const std::size_t nn = static_cast<std::size_t>(n);
  int ix[4], iy[4];
  double wx[4], wy[4];
  stencil(x[0], n, ix, wx);
  stencil(x[1], n, iy, wy);
  double s = 0.0;
  if (g.dim == 2) {
    for (int a = 0; a < 4; ++a) {
      const double* row = &v[static_cast<std::size_t>(ix[a]) * nn];
      s += wx[a] * (wy[0] * row[iy[0]] + wy[1] * row[iy[1]] + wy[2] * row[iy[2]] + wy[3] * row[iy[3]]);
    }
    return s;
  }
  int iz[4];
  double wz[4];
  stencil(x[2], n, iz, wz);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double* row = &v[(static_cast<std::size_t>(ix[a]) * nn + static_cast<std::size_t>(iy[b])) * nn];
      s += wx[a] * wy[b] * (wz[0] * row[iz[0]] + wz[1] * row[iz[1]] + wz[2] * row[iz[2]] + wz[3] * row[iz[3]]);
    }
  }
  return s;
}

Point axpy(const Point& x, double h, const Point& u) { return {x[0] + h * u[0], x[1] + h * u[1], x[2] + h * u[2]}; }

Point rk4_increment(const std::vector<FlowMode>& modes, const Point& x, double h) {
  const Point k1 = evaluate_modes(modes, x);
  const Point k2 = evaluate_modes(modes, axpy(x, 0.5 * h, k1));
  const Point k3 = evaluate_modes(modes, axpy(x, 0.5 * h, k2));
  const Point k4 = evaluate_modes(modes, axpy(x, h, k3));
  Point d;
  for (int a = 0; a < 3; ++a) d[a] = h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
  return d;
}

std::vector<double> semi_lagrangian(const std::vector<double>& v, const Grid& g,
                                     const std::vector<FlowMode>& modes, double h) {
  std::vector<double> out(v.size());
  const ScalarField probe = ScalarField::zeros(g);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point x = probe.node(i);
    Point foot = axpy(x, 1.0, rk4_increment(modes, x, -h));
    for (int a = g.dim; a < 3; ++a) foot[a] = 0.0;
    out[i] = interpolate(v, g, foot);
  }
  return out;
}

}  // namespace

ScalarField transport_step(const ScalarField& f, const FlowSpec& flow, double t, double dt) {
  const Grid& g = f.grid();
  if (flow.dim != g.dim) throw InvalidArgument("flow and field dimensions differ");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("transport dt must be > 0");
  std::vector<double> v = f.values();
  const double end = t + dt;
  double s = t;
  while (s < end) {
    const double sw = next_switch_after(flow, s);
    const double seg_end = std::min(end, sw);
    const std::vector<FlowMode> modes = active_modes(flow, s);
    if (!modes.empty()) v = semi_lagrangian(v, g, modes, seg_end - s);
    s = seg_end;
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalOverflow();
  }
  return ScalarField(g, std::move(v));
}

FlowMapResult flow_map(const FlowSpec& flow, const Point& x, double t0, double t1, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("flow_map dt must be > 0");
  Point pos = x;
  for (int a = flow.dim; a < 3; ++a) pos[a] = 0.0;
  const Point start = pos;
  double s = t0;
  if (t1 >= t0) {
    while (s < t1) {
      const double sw = next_switch_after(flow, s);
      const double h = std::min({dt, t1 - s, sw - s});
      const Point d = rk4_increment(active_modes(flow, s), pos, h);
      pos = axpy(pos, 1.0, d);
      s = (h == t1 - s) ? t1 : (h == sw - s ? sw : s + h);
    }
  } else {
    while (s > t1) {
      const double sw = previous_switch_before(flow, s);
      const double h = std::min({dt, s - t1, s - sw});
      const Point d = rk4_increment(active_modes(flow, s - 0.5 * h), pos, -h);
      pos = axpy(pos, 1.0, d);
      s = (h == s - t1) ? t1 : (h == s - sw ? sw : s - h);
    }
  }
  FlowMapResult r;
  for (int a = 0; a < 3; ++a) r.displacement[a] = pos[a] - start[a];
  r.position = wrap_to_torus(pos, flow.dim);
  return r;
}

}  // namespace ksmix
