#include "ksmix/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "fft.hpp"
#include "ksmix/spectral.hpp"
#include "records.hpp"

namespace ksmix {

using detail::cplx;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool same_modes(const std::vector<FlowMode>& a, const std::vector<FlowMode>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].k != b[i].k || a[i].amp != b[i].amp || a[i].phase != b[i].phase) return false;
  }
  return true;
}

struct StepTables {
  std::array<std::vector<double>, 3> deriv;
  std::vector<double> inv_lap;
  std::vector<char> keep;
  std::vector<std::size_t> level;
  std::vector<double> ksq_levels;
};

StepTables build_step_tables(const Grid& grid, double dealias_fraction) {
  const detail::ModeTable& t = detail::mode_table(grid);
  const std::size_t m = t.size();
  const int nyq = grid.n / 2;
  const double cut = dealias_fraction * grid.n / 2.0;
  StepTables s;
  for (int a = 0; a < grid.dim; ++a) s.deriv[a].resize(m);
  s.inv_lap.resize(m);
  s.keep.resize(m);
  s.level.resize(m);
  std::map<double, std::size_t> levels;
  for (std::size_t i = 0; i < m; ++i) {
    const int k[3] = {t.kx[i], t.ky[i], t.kz[i]};
    for (int a = 0; a < grid.dim; ++a) s.deriv[a][i] = k[a] == nyq ? 0.0 : kTwoPi * k[a];
    s.inv_lap[i] = t.ksq[i] == 0.0 ? 0.0 : 1.0 / (kTwoPi * kTwoPi * t.ksq[i]);
    s.keep[i] = t.kmax[i] <= cut && t.ksq[i] != 0.0;
    levels.emplace(t.ksq[i], 0);
  }
  std::size_t idx = 0;
  for (auto& kv : levels) {
    kv.second = idx++;
    s.ksq_levels.push_back(kv.first);
  }
  for (std::size_t i = 0; i < m; ++i) s.level[i] = levels[t.ksq[i]];
  return s;
}

const StepTables& step_tables(const Grid& grid, double dealias_fraction) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, double>, std::unique_ptr<StepTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(grid.dim, grid.n, dealias_fraction);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<StepTables>(build_step_tables(grid, dealias_fraction))).first;
  }
  return *it->second;
}

// Integrating-factor midpoint stepper working on the raw half spectrum.
class KsStepper {
 public:
  KsStepper(const Grid& grid, const StepperConfig& cfg)
      : g_(grid),
        cfg_(cfg),
        fft_(grid),
        t_(detail::mode_table(grid)),
        tab_(step_tables(grid, cfg.dealias_fraction)),
        inv_n_(1.0 / static_cast<double>(grid.size())) {
    const std::size_t m = t_.size();
    rho_hat_.resize(m);
    stage_.resize(m);
    n1_.resize(m);
    n2_.resize(m);
    work_.resize(m);
    rho_.resize(grid.size());
    phys_.resize(grid.size());
    for (int a = 0; a < grid.dim; ++a) {
      grad_c_[a].resize(grid.size());
      flux_[a].resize(grid.size());
      flux_hat_[a].resize(m);
    }
  }

  void load(const ScalarField& rho) {
    fft_.forward(rho.values().data(), rho_hat_.data());
    rho_ = rho.values();
    n1_valid_ = false;
  }

  // Evaluates the nonlinear term at the current state and returns the CFL-limited dt.
  double prepare(const FlowSpec& flow, double t) {
    nonlinear(rho_hat_, active_modes(flow, t), n1_, true);
    n1_valid_ = true;
    const double speed = max_u_ + max_grad_c_;
    return std::min(cfg_.dt_max, cfg_.cfl * g_.spacing / (speed + 1e-30));
  }

  double max_rho() const { return max_rho_; }

  void step(const FlowSpec& flow, double t, double dt) {
    if (!n1_valid_) prepare(flow, t);
    const std::size_t m = t_.size();
    std::vector<double> e_full(tab_.ksq_levels.size()), e_half(tab_.ksq_levels.size());
    for (std::size_t l = 0; l < tab_.ksq_levels.size(); ++l) {
      e_full[l] = std::exp(-kTwoPi * kTwoPi * tab_.ksq_levels[l] * dt);
      e_half[l] = std::exp(-kTwoPi * kTwoPi * tab_.ksq_levels[l] * 0.5 * dt);
    }
    for (std::size_t i = 0; i < m; ++i) stage_[i] = e_half[tab_.level[i]] * (rho_hat_[i] + 0.5 * dt * n1_[i]);
    nonlinear(stage_, active_modes(flow, t + 0.5 * dt), n2_, false);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t l = tab_.level[i];
      rho_hat_[i] = e_full[l] * rho_hat_[i] + dt * e_half[l] * n2_[i];
    }
    n1_valid_ = false;
    fft_.backward(rho_hat_.data(), rho_.data());
    for (double& v : rho_) {
      v *= inv_n_;
      if (!std::isfinite(v)) throw NumericalOverflow();
    }
  }

  double l2_dev() const {
    double s = 0.0;
    for (std::size_t i = 1; i < t_.size(); ++i) s += t_.weight[i] * std::norm(rho_hat_[i]);
    return std::sqrt(s) * inv_n_;
  }

  const std::vector<cplx>& half() const { return rho_hat_; }
  const std::vector<double>& phys() const { return rho_; }

  SimState state(double t, double crit, double mean, double last_dt) const {
    SimState s;
    s.t = t;
    s.rho = ScalarField(g_, rho_);
    s.rho_hat = detail::half_to_full(g_, rho_hat_);
    s.criterion_integral = crit;
    s.mean = mean;
    s.last_dt = last_dt;
    return s;
  }

 private:
  void nonlinear(const std::vector<cplx>& in, const std::vector<FlowMode>& modes, std::vector<cplx>& out, bool stats) {
    const int d = g_.dim;
    const std::size_t m = t_.size();
    const std::size_t np = g_.size();
    fft_.backward(in.data(), phys_.data());
    for (double& v : phys_) v *= inv_n_;
    if (!have_modes_ || !same_modes(modes, modes_)) {
      modes_ = modes;
      have_modes_ = true;
      sample_velocity(modes_, g_, vel_);
      vel_zero_ = modes_.empty();
      max_vel_ = 0.0;
      for (std::size_t p = 0; p < np && !vel_zero_; ++p) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += vel_[a][p] * vel_[a][p];
        max_vel_ = std::max(max_vel_, s);
      }
      max_vel_ = std::sqrt(max_vel_);
    }
    if (cfg_.chemotaxis) {
      for (int a = 0; a < d; ++a) {
        for (std::size_t i = 0; i < m; ++i) work_[i] = in[i] * cplx(0.0, tab_.deriv[a][i] * tab_.inv_lap[i]);
        fft_.backward(work_.data(), grad_c_[a].data());
        for (double& v : grad_c_[a]) v *= inv_n_;
      }
    }
    double gmax = 0.0, rmax = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      const double r = phys_[p];
      double gsq = 0.0;
      for (int a = 0; a < d; ++a) {
        const double gc = cfg_.chemotaxis ? grad_c_[a][p] : 0.0;
        const double u = vel_zero_ ? 0.0 : vel_[a][p];
        flux_[a][p] = r * (u + gc);
        gsq += gc * gc;
      }
      if (stats) {
        gmax = std::max(gmax, gsq);
        rmax = std::max(rmax, std::abs(r));
      }
    }
    if (stats) {
      max_grad_c_ = std::sqrt(gmax);
      max_rho_ = rmax;
      max_u_ = max_vel_;
    }
    for (int a = 0; a < d; ++a) fft_.forward(flux_[a].data(), flux_hat_[a].data());
    for (std::size_t i = 0; i < m; ++i) {
      if (!tab_.keep[i]) {
        out[i] = 0.0;
        continue;
      }
      cplx s = 0.0;
      for (int a = 0; a < d; ++a) s += flux_hat_[a][i] * tab_.deriv[a][i];
      out[i] = cplx(s.imag(), -s.real());
    }
  }

  Grid g_;
  StepperConfig cfg_;
  detail::Fft fft_;
  const detail::ModeTable& t_;
  double inv_n_;
  const StepTables& tab_;
  std::vector<cplx> rho_hat_, stage_, n1_, n2_, work_;
  std::array<std::vector<cplx>, 3> flux_hat_;
  std::vector<double> rho_, phys_;
  std::array<std::vector<double>, 3> grad_c_, flux_, vel_;
  std::vector<FlowMode> modes_;
  bool have_modes_ = false;
  bool vel_zero_ = true;
  double max_vel_ = 0.0;
  bool n1_valid_ = false;
  double max_u_ = 0.0, max_grad_c_ = 0.0, max_rho_ = 0.0;
};

std::string format_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double criterion_power(double l2, int dim) { return std::pow(l2, 4.0 / (4.0 - dim)); }

void check_inputs(const Grid& g, const FlowSpec& flow, const StepperConfig& cfg) {
  cfg.validate();
  if (flow.dim != g.dim) throw InvalidArgument("flow and field dimensions differ");
}

}  // namespace

CflViolation::CflViolation(double req, double adm)
    : InvalidArgument("timestep " + format_g(req) + " violates the CFL limit; admissible dt = " + format_g(adm)),
      requested(req),
      admissible(adm) {}

void StepperConfig::validate() const {
  if (!(dt_max > 0.0)) throw InvalidArgument("dt_max must be > 0");
  if (!(cfl > 0.0)) throw InvalidArgument("cfl must be > 0");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw InvalidArgument("dealias_fraction must lie in (0, 1]");
  }
  if (!(negative_tolerance >= 0.0)) throw InvalidArgument("negative_tolerance must be >= 0");
  if (!(hyperdiffusion_for_transport >= 0.0)) throw InvalidArgument("hyperdiffusion_for_transport must be >= 0");
  if (!(transport_cfl > 0.0)) throw InvalidArgument("transport_cfl must be > 0");
}

SimState make_state(const ScalarField& rho0, double t0) {
  SimState s;
  s.t = t0;
  s.rho = rho0;
  s.rho_hat = to_spectral(rho0);
  s.mean = s.rho_hat.at(Wavevector{0, 0, 0}).real();
  return s;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::COMPLETED: return "COMPLETED";
    case Termination::BLOWUP_DETECTED: return "BLOWUP_DETECTED";
    case Termination::OVERFLOW: return "OVERFLOW";
  }
  return "UNKNOWN";
}

double admissible_dt(const SimState& state, const FlowSpec& flow, const StepperConfig& cfg) {
  const Grid& g = state.rho.grid();
  check_inputs(g, flow, cfg);
  KsStepper st(g, cfg);
  st.load(state.rho);
  return st.prepare(flow, state.t);
}

SimState ks_step(const SimState& state, const FlowSpec& flow, double dt, const StepperConfig& cfg) {
  const Grid& g = state.rho.grid();
  check_inputs(g, flow, cfg);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("ks_step dt must be > 0");
  KsStepper st(g, cfg);
  st.load(state.rho);
  const double limit = st.prepare(flow, state.t);
  if (dt > limit * (1.0 + 1e-12)) throw CflViolation(dt, limit);
  const double l2 = st.l2_dev();
  st.step(flow, state.t, dt);
  return st.state(state.t + dt, state.criterion_integral + dt * criterion_power(l2, g.dim), state.mean, dt);
}

RunResult run_simulation(const ScalarField& rho0, const FlowSpec& flow, double T, const StepperConfig& cfg,
                         const RunOptions& opts) {
  const Grid& g = rho0.grid();
  check_inputs(g, flow, cfg);
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("horizon T must be > 0");
  if (opts.diag_stride < 1) throw InvalidArgument("diag_stride must be >= 1");
  if (opts.pn_radius < 0) throw InvalidArgument("pn_radius must be >= 0");
  if (rho0.min() < -cfg.negative_tolerance * std::max(rho0.max(), 0.0)) {
    throw InvalidArgument("initial density is negative beyond negative_tolerance");
  }
  KsStepper st(g, cfg);
  st.load(rho0);
  const double mean = st.half()[0].real() / static_cast<double>(g.size());
  double t = 0.0, crit = 0.0, last_dt = 0.0;
  RunResult res;

  auto make_record = [&]() {
    DiagnosticsRecord r = detail::record_from_half(g, st.half(), st.phys(), opts.pn_radius);
    r.t = t;
    r.criterion_integral = crit;
    r.dt_used = last_dt;
    return r;
  };

  std::vector<DiagnosticsRecord> window{make_record()};
  res.records.push_back(window.back());
  res.sup_l2_dev = window.back().l2_dev;
  if (opts.observer) opts.observer(st.state(t, crit, mean, last_dt));
  const double min_dt = 1e-13 * T;
  bool stored_last = true;

  while (t < T) {
    double dt = st.prepare(flow, t);
    if (cfg.reaction_limit && st.max_rho() > 0.0) dt = std::min(dt, cfg.cfl / st.max_rho());
    const double sw = next_switch_after(flow, t);
    double t_next = t + dt;
    if (T - t_next <= min_dt) t_next = T;
    if (sw - t_next <= min_dt) t_next = std::min(sw, T);
    dt = t_next - t;
    if (t_next >= T) {
      dt = T - t;
      t_next = T;
    }
    if (t_next >= sw) {
      dt = sw - t;
      t_next = sw;
    }
    if (dt < min_dt) {
      res.termination = Termination::OVERFLOW;
      break;
    }
    const double l2 = st.l2_dev();
    try {
      st.step(flow, t, dt);
    } catch (const NumericalOverflow&) {
      res.termination = Termination::OVERFLOW;
      break;
    }
    crit += dt * criterion_power(l2, g.dim);
    t = t_next;
    last_dt = dt;
    ++res.steps;
    const DiagnosticsRecord r = make_record();
    res.sup_l2_dev = std::max(res.sup_l2_dev, r.l2_dev);
    window = {window.back(), r};
    const DetectorResult det = blowup_detect(window, opts.detector);
    stored_last = false;
    if (res.steps % static_cast<std::size_t>(opts.diag_stride) == 0 || t >= T || det.fired) {
      res.records.push_back(r);
      stored_last = true;
      if (opts.observer) opts.observer(st.state(t, crit, mean, last_dt));
    }
    if (det.fired && res.clause == DetectorClause::NONE) {
      res.clause = det.clause;
      res.termination = det.clause == DetectorClause::NEGATIVITY ? Termination::OVERFLOW
                                                                  : Termination::BLOWUP_DETECTED;
      if (opts.stop_on_detect) break;
    }
  }
  res.final_state = st.state(t, crit, mean, last_dt);
  if (!stored_last) {
    res.records.push_back(window.back());
    if (opts.observer) opts.observer(res.final_state);
  }
  return res;
}

PairedResult paired_run(const ScalarField& rho0, const FlowSpec& flow, double t_window, const StepperConfig& cfg,
                        int samples) {
  const Grid& g = rho0.grid();
  check_inputs(g, flow, cfg);
  if (!(t_window > 0.0) || !std::isfinite(t_window)) throw InvalidArgument("t_window must be > 0");
  if (samples < 1) throw InvalidArgument("paired_run needs at least one sample");
  if (rho0.min() < -cfg.negative_tolerance * std::max(rho0.max(), 0.0)) {
    throw InvalidArgument("initial density is negative beyond negative_tolerance");
  }
  KsStepper st(g, cfg);
  st.load(rho0);
  ScalarField eta = rho0;
  PairedResult res;
  double t_rho = 0.0, t_eta = 0.0;
  const double lip = flow.declared_lipschitz;
  const double snap = 1e-13 * t_window;
  for (int s = 1; s <= samples; ++s) {
    const double target = s == samples ? t_window : t_window * s / samples;
    while (t_rho < target) {
      double dt = st.prepare(flow, t_rho);
      if (cfg.reaction_limit && st.max_rho() > 0.0) dt = std::min(dt, cfg.cfl / st.max_rho());
      const double sw = next_switch_after(flow, t_rho);
      double t_next = t_rho + dt;
      if (target - t_next <= snap) t_next = target;
      if (sw - t_next <= snap) t_next = std::min(sw, target);
      dt = t_next - t_rho;
      if (t_next >= target) {
        dt = target - t_rho;
        t_next = target;
      }
      if (t_next >= sw) {
        dt = sw - t_rho;
        t_next = sw;
      }
      st.step(flow, t_rho, dt);
      t_rho = t_next;
    }
    while (t_eta < target) {
      double dt = target - t_eta;
      if (lip > 0.0) dt = std::min(dt, cfg.transport_cfl / lip);
      const double t_next = (dt == target - t_eta) ? target : t_eta + dt;
      eta = transport_step(eta, flow, t_eta, t_next - t_eta);
      t_eta = t_next;
    }
    double sum = 0.0;
    const std::vector<double>& r = st.phys();
    for (std::size_t i = 0; i < r.size(); ++i) sum += (r[i] - eta[i]) * (r[i] - eta[i]);
    const double dist = std::sqrt(sum / static_cast<double>(r.size()));
    res.distances.emplace_back(target, dist);
    res.sup_distance = std::max(res.sup_distance, dist);
  }
  return res;
}

}  // namespace ksmix
