#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ksmix/initdata.hpp"
#include "ksmix/solver.hpp"
#include "ksmix/spectral.hpp"

using namespace ksmix;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

ScalarField sine_perturbation(const Grid& g, double eps) {
  return ScalarField::sample(g, [eps](const Point& x) { return 1.0 + eps * std::sin(2 * kPi * x[0]); });
}

double mode_sine_amplitude(const ScalarField& f) {
  return -2.0 * to_spectral(f).at({1, 0, 0}).imag();
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) { return lp_norm(a - b, kInf); }

SimState advance(SimState s, const FlowSpec& flow, double T, int steps, const StepperConfig& cfg) {
  const double dt = T / steps;
  for (int i = 0; i < steps; ++i) s = ks_step(s, flow, dt, cfg);
  return s;
}

ScalarField positive_random(const Grid& g, std::uint64_t seed) {
  const ScalarField f = random_smooth_field(g, seed, 3.0);
  return ScalarField::constant(g, 1.0) + f * (0.6 / lp_norm(f, kInf));
}

}  // namespace

TEST_CASE("constant density is a fixed point under any flow") {
  const Grid g = make_grid(2, 64);
  const ScalarField one = ScalarField::constant(g, 2.0);
  for (const FlowSpec& flow : {make_zero_flow(), scale_amplitude(make_cellular(2), 10.0),
                               scale_amplitude(make_shear_alternating(1, 1e-3, 5), 30.0)}) {
    SimState s = make_state(one);
    for (int i = 0; i < 20; ++i) s = ks_step(s, flow, 1e-4, StepperConfig{});
    CHECK(max_abs_diff(s.rho, one) < 1e-13);
  }
}

TEST_CASE("linearized mode-1 decay over one step") {
  const Grid g = make_grid(2, 64);
  const double eps = 1e-6;
  const SimState s = ks_step(make_state(sine_perturbation(g, eps)), make_zero_flow(), 1e-3, StepperConfig{});
  const double factor = mode_sine_amplitude(s.rho) / eps;
  CHECK(factor == doctest::Approx(std::exp((1 - 4 * kPi * kPi) * 1e-3)).epsilon(1e-4));
  CHECK(factor == doctest::Approx(0.96224).epsilon(1e-4));
}

TEST_CASE("each step conserves mass to rounding") {
  const Grid g = make_grid(2, 64);
  const FlowSpec flow = scale_amplitude(make_cellular(1), 5.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SimState s = make_state(positive_random(g, seed));
    const double m0 = s.rho.mean();
    const double fixed = s.mean;
    for (int i = 0; i < 50; ++i) {
      const double before = s.rho.mean();
      s = ks_step(s, flow, 1e-4, StepperConfig{});
      CHECK(std::abs(s.rho.mean() - before) <= 1e-13 * std::abs(m0));
    }
    CHECK(s.mean == fixed);
  }
}

TEST_CASE("criterion integral advances by the left-endpoint rule") {
  const Grid g = make_grid(2, 32);
  const SimState s0 = make_state(sine_perturbation(g, 0.1));
  const SimState s1 = ks_step(s0, make_zero_flow(), 1e-4, StepperConfig{});
  const double dev = lp_norm(s0.rho - ScalarField::constant(g, s0.mean), 2.0);
  CHECK(s1.criterion_integral == doctest::Approx(1e-4 * dev * dev).epsilon(1e-12));
  CHECK(s1.t == doctest::Approx(1e-4));
}

TEST_CASE("ks_step rejects steps above the admissible timestep") {
  const Grid g = make_grid(2, 64);
  const SimState s = make_state(sine_perturbation(g, 0.1));
  const FlowSpec fast = scale_amplitude(make_shear_alternating(1, 1.0, 0), 1000.0);
  const double adm = admissible_dt(s, fast, StepperConfig{});
  CHECK(adm > 0.0);
  CHECK(adm <= 0.5 * g.spacing / 1000.0 * (1 + 1e-12));
  try {
    ks_step(s, fast, 2 * adm, StepperConfig{});
    FAIL("expected a CFL violation");
  } catch (const CflViolation& e) {
    CHECK(e.admissible == doctest::Approx(adm));
    CHECK(std::string(e.what()).find("CFL") != std::string::npos);
  }
  CHECK_NOTHROW(ks_step(s, fast, adm, StepperConfig{}));
  StepperConfig bad;
  bad.dealias_fraction = 1.5;
  CHECK_THROWS_AS(ks_step(s, fast, adm, bad), InvalidArgument);
}

TEST_CASE("ks_step is second order at fixed final time") {
  const Grid g = make_grid(2, 32);
  const FlowSpec flow = make_cellular(1);
  const SimState s0 = make_state(positive_random(g, 4) * 5.0);
  const double T = 4e-3;
  const ScalarField ref = advance(s0, flow, T, 256, StepperConfig{}).rho;
  std::vector<double> err;
  for (int steps : {4, 8, 16}) err.push_back(max_abs_diff(advance(s0, flow, T, steps, StepperConfig{}).rho, ref));
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double ratio = err[i - 1] / err[i];
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }
}

TEST_CASE("transport step with zero and constant flow") {
  const Grid g = make_grid(2, 128);
  const ScalarField f = random_smooth_field(g, 3, 3.0);
  CHECK(max_abs_diff(transport_step(f, make_zero_flow(), 0.0, 0.3), f) < 1e-15);

  const ScalarField moved = transport_step(f, make_uniform_flow(2, {1.0, 0.0, 0.0}), 0.0, 0.25);
  std::vector<double> shifted(g.size());
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) shifted[f.index(i, j)] = f.at((i - g.n / 4 + g.n) % g.n, j);
  }
  CHECK(max_abs_diff(moved, ScalarField(g, shifted)) <= 1e-8);

}

TEST_CASE("transport of band-limited data under a non-grid shift matches the exact translate") {
  const Grid g = make_grid(2, 128);
  const ScalarField f = ScalarField::sample(g, [](const Point& x) {
    return std::sin(2 * kPi * x[0]) + 0.5 * std::cos(2 * kPi * (2 * x[1] + x[0]));
  });
  const Point v{0.3, -0.7, 0.0};
  const double dt = 0.1;
  const ScalarField out = transport_step(f, make_uniform_flow(2, v), 0.0, dt);
  const ScalarField exact = ScalarField::sample(g, [&](const Point& x) {
    const double X = x[0] - v[0] * dt, Y = x[1] - v[1] * dt;
    return std::sin(2 * kPi * X) + 0.5 * std::cos(2 * kPi * (2 * Y + X));
  });
  CHECK(max_abs_diff(out, exact) <= 1e-5);
}

TEST_CASE("transport step overshoot is at interpolation level") {
  const Grid g = make_grid(2, 128);
  const ScalarField f = ScalarField::sample(g, [](const Point& x) {
    return std::sin(2 * kPi * x[0]) + 0.5 * std::cos(2 * kPi * (x[0] + x[1]) + 0.3);
  });
  const double osc = f.max() - f.min();
  ScalarField h = f;
  const FlowSpec flow = make_shear_alternating(1, 0.2, 3);
  for (int i = 0; i < 4; ++i) h = transport_step(h, flow, 0.05 * i, 0.05);
  CHECK(h.max() <= f.max() + 1e-6 * osc);
  CHECK(h.min() >= f.min() - 1e-6 * osc);
}

TEST_CASE("transport conserves the L2 norm of band-limited data under Lipschitz-1 flows") {
  const Grid g = make_grid(2, 128);
  const ScalarField f = ScalarField::sample(g, [](const Point& x) { return std::sin(2 * kPi * x[0]) * std::cos(2 * kPi * x[1]); });
  const double l2 = lp_norm(f, 2.0);
  for (const FlowSpec& flow : {scale_amplitude(make_cellular(1), 1.0 / (2 * kPi)), make_multiscale_mixer(2, 0.5, g)}) {
    ScalarField h = f;
    const double dt = 0.25;
    for (int i = 0; i < 4; ++i) h = transport_step(h, flow, dt * i, dt);
    CHECK(std::abs(lp_norm(h, 2.0) - l2) <= 1e-5 * l2);
  }
}

TEST_CASE("flow map examples") {
  const Point x{0.1, -0.2, 0.0};
  const FlowMapResult z = flow_map(make_zero_flow(), x, 0.0, 2.0, 0.1);
  CHECK(std::abs(z.position[0] - x[0]) < 1e-15);
  CHECK(std::abs(z.position[1] - x[1]) < 1e-15);

  const FlowSpec shear = make_shear_alternating(1, 100.0, 0);
  for (double t : {0.3, 0.7, 1.3}) {
    const FlowMapResult r = flow_map(shear, {0.0, 0.25, 0.0}, 0.0, t, 1e-3);
    double expect = std::fmod(t, 1.0);
    if (expect >= 0.5) expect -= 1.0;
    CHECK(std::abs(r.position[0] - expect) <= 1e-10);
    CHECK(std::abs(r.position[1] - 0.25) <= 1e-10);
    CHECK(std::abs(r.displacement[0] - t) <= 1e-10);
  }
}

TEST_CASE("cellular flow map is area preserving") {
  const FlowSpec c = make_cellular(1);
  const double h = 1e-5;
  for (const Point x : {Point{0.1, 0.2, 0.0}, Point{-0.3, 0.05, 0.0}, Point{0.37, -0.41, 0.0}}) {
    auto disp = [&](double dx, double dy) {
      const FlowMapResult r = flow_map(c, {x[0] + dx, x[1] + dy, 0.0}, 0.0, 1.0, 1e-3);
      return Point{x[0] + dx + r.displacement[0], x[1] + dy + r.displacement[1], 0.0};
    };
    const Point xp = disp(h, 0), xm = disp(-h, 0), yp = disp(0, h), ym = disp(0, -h);
    const double j00 = (xp[0] - xm[0]) / (2 * h), j10 = (xp[1] - xm[1]) / (2 * h);
    const double j01 = (yp[0] - ym[0]) / (2 * h), j11 = (yp[1] - ym[1]) / (2 * h);
    CHECK(std::abs(j00 * j11 - j01 * j10 - 1.0) <= 1e-6);
  }
}

TEST_CASE("reversed flow map inverts the forward map") {
  const Grid g = make_grid(2, 64);
  for (const FlowSpec& f : {make_cellular(2), make_shear_alternating(1, 0.13, 6), make_multiscale_mixer(3, 0.4, g)}) {
    const Point x{0.21, -0.33, 0.0};
    const FlowMapResult fwd = flow_map(f, x, 0.05, 1.05, 1e-3);
    const FlowMapResult back = flow_map(f, fwd.position, 1.05, 0.05, 1e-3);
    const Point w = wrap_to_torus({back.position[0] - x[0], back.position[1] - x[1], 0.0}, 2);
    CHECK(std::hypot(w[0], w[1]) <= 1e-8);
  }
}

TEST_CASE("Hdot^1 growth under transport is controlled by the integrated Lipschitz bound") {
  const Grid g = make_grid(2, 128);
  const FlowSpec flow = make_cellular(1);
  const double D = flow.declared_lipschitz;
  std::vector<double> kappas;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    ScalarField h = random_smooth_field(g, seed, 3.0);
    const double h0 = sobolev_norm(h, 1.0, NormConvention::PAPER);
    double kappa = 0.0;
    const double dt = 0.02;
    for (int i = 1; i <= 25; ++i) {
      h = transport_step(h, flow, dt * (i - 1), dt);
      const double growth = std::log(sobolev_norm(h, 1.0, NormConvention::PAPER) / h0);
      kappa = std::max(kappa, growth / (D * dt * i));
    }
    CHECK(kappa <= 1.0);
    kappas.push_back(kappa);
  }
  const double lo = *std::min_element(kappas.begin(), kappas.end());
  const double hi = *std::max_element(kappas.begin(), kappas.end());
  const double mid = 0.5 * (lo + hi);
  MESSAGE("fitted growth constant per unit integrated Lipschitz bound: " << mid);
  CHECK(hi <= 1.2 * mid);
  CHECK(lo >= 0.8 * mid);
}

TEST_CASE("run_simulation on equilibrium and small data") {
  const Grid g = make_grid(2, 32);
  const RunResult eq = run_simulation(ScalarField::constant(g, 1.0), make_zero_flow(), 1.0, StepperConfig{});
  CHECK(eq.termination == Termination::COMPLETED);
  for (const auto& r : eq.records) CHECK(r.l2_dev <= 1e-12);

  const ScalarField small = ScalarField::sample(g, [](const Point& x) {
    return 1.0 + 0.1 * std::sin(2 * kPi * x[0]) * std::sin(2 * kPi * x[1]);
  });
  const RunResult r = run_simulation(small, make_zero_flow(), 1.0, StepperConfig{});
  CHECK(r.termination == Termination::COMPLETED);
  CHECK(r.final_state.t == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < r.records.size(); ++i) CHECK(r.records[i].l2_dev <= r.records[i - 1].l2_dev);
  CHECK(r.records.back().l2_dev < 1e-20);
  double drift = 0.0;
  for (const auto& rec : r.records) drift = std::max(drift, std::abs(rec.mass - 1.0));
  CHECK(drift <= 1e-10);

  // linear-regime rate 1 - 8 pi^2 for the (1,1) mode
  const auto& a = r.records[r.records.size() / 20];
  const auto& b = r.records[r.records.size() / 10];
  const double rate = std::log(b.l2_dev / a.l2_dev) / (b.t - a.t);
  CHECK(rate == doctest::Approx(1 - 8 * kPi * kPi).epsilon(1e-3));
}

TEST_CASE("run_simulation rejects negative initial data") {
  const Grid g = make_grid(2, 32);
  CHECK_THROWS_AS(run_simulation(sine_perturbation(g, 1.5), make_zero_flow(), 0.1, StepperConfig{}), InvalidArgument);
  CHECK_THROWS_AS(run_simulation(sine_perturbation(g, 0.5), make_zero_flow(), 0.0, StepperConfig{}), InvalidArgument);
}

TEST_CASE("concentrated supercritical data stops early, sooner for larger mass") {
  const Grid g = make_grid(2, 128);
  double prev = kInf;
  for (double M : {60.0, 90.0}) {
    const RunResult r = run_simulation(gaussian_bump(g, M, 0.03, {0.0, 0.0, 0.0}), make_zero_flow(), 0.01, StepperConfig{});
    CHECK(r.termination != Termination::COMPLETED);
    CHECK(r.clause != DetectorClause::NONE);
    CHECK(r.final_state.t < prev);
    prev = r.final_state.t;
  }
}

TEST_CASE("subcritical run is resolution converged") {
  StepperConfig cfg;
  cfg.dt_max = 1e-5;
  std::vector<ScalarField> finals;
  for (int n : {128, 256}) {
    const Grid g = make_grid(2, n);
    RunOptions o;
    o.diag_stride = 1000;
    const RunResult r = run_simulation(gaussian_bump(g, 5.0, 0.03, {0.0, 0.0, 0.0}), make_zero_flow(), 0.005, cfg, o);
    REQUIRE(r.termination == Termination::COMPLETED);
    finals.push_back(r.final_state.rho);
  }
  std::vector<double> sub(128 * 128);
  for (int i = 0; i < 128; ++i) {
    for (int j = 0; j < 128; ++j) sub[i * 128 + j] = finals[1].at(2 * i, 2 * j);
  }
  CHECK(lp_norm(finals[0] - ScalarField(finals[0].grid(), sub), 2.0) <= 1e-6);
}

TEST_CASE("run_simulation is deterministic and honours the stride") {
  const Grid g = make_grid(2, 32);
  RunOptions o;
  o.diag_stride = 7;
  const ScalarField rho0 = positive_random(g, 5);
  const FlowSpec flow = scale_amplitude(make_shear_alternating(1, 1e-3, 2), 20.0);
  const RunResult a = run_simulation(rho0, flow, 0.02, StepperConfig{}, o);
  const RunResult b = run_simulation(rho0, flow, 0.02, StepperConfig{}, o);
  CHECK(a.final_state.rho.values() == b.final_state.rho.values());
  REQUIRE(a.records.size() == b.records.size());
  CHECK(a.records.size() >= 2);
  CHECK(a.records.front().t == 0.0);
  CHECK(a.records.back().t == doctest::Approx(0.02));
  CHECK(a.records.size() <= a.steps / 7 + 2);
  std::size_t observed = 0;
  o.observer = [&](const SimState&) { ++observed; };
  const RunResult c = run_simulation(rho0, flow, 0.02, StepperConfig{}, o);
  CHECK(observed == c.records.size());
}

TEST_CASE("paired run examples") {
  const Grid g = make_grid(2, 64);
  const PairedResult flat = paired_run(ScalarField::constant(g, 3.0), make_cellular(1), 0.05, StepperConfig{}, 8);
  CHECK(flat.sup_distance <= 1e-12);
  CHECK(flat.distances.size() == 8u);

  const double eps = 1e-3;
  const PairedResult lin = paired_run(sine_perturbation(g, eps), make_zero_flow(), 0.05, StepperConfig{}, 10);
  for (const auto& [t, d] : lin.distances) {
    const double expect = eps / std::sqrt(2.0) * std::abs(std::exp((1 - 4 * kPi * kPi) * t) - 1.0);
    CHECK(d == doctest::Approx(expect).epsilon(0.05));
  }
  CHECK(lin.distances.back().first == doctest::Approx(0.05));
}

TEST_CASE("paired run distance shrinks as the amplitude grows at fixed flow time") {
  const Grid g = make_grid(2, 128);
  const ScalarField rho0 = gaussian_bump(g, 20.0, 0.05, {0.1, 0.05, 0.0});
  const FlowSpec base = make_cellular(1);
  const double A = 100.0;
  const double dA = paired_run(rho0, scale_amplitude(base, A), 1.0 / A, StepperConfig{}, 16).sup_distance;
  const double d4A = paired_run(rho0, scale_amplitude(base, 4 * A), 1.0 / (4 * A), StepperConfig{}, 16).sup_distance;
  CHECK(d4A < dA);
}
