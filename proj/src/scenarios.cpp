#include "ksmix/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "ksmix/initdata.hpp"
#include "ksmix/spectral.hpp"

namespace ksmix {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCriticalMass2D = 8.0 * std::numbers::pi;
constexpr double kDefaultHorizon = 0.01;

std::string real_or_na(double x) { return std::isnan(x) ? "NA" : format_real(x); }

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v[i]);
    s += buf;
  }
  return s + "]";
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string index_name(const std::string& stem, std::size_t i, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return stem + "_" + buf + ext;
}

RunOptions run_options(const RunConfig& cfg) {
  RunOptions o;
  o.diag_stride = cfg.scenario.diag_stride;
  o.pn_radius = cfg.scenario.pn_radius;
  o.detector = cfg.detector;
  return o;
}

double initial_l2_dev(const ScalarField& rho0) {
  return record(make_state(rho0), 0).l2_dev;
}

double detection_time(const RunResult& r) {
  return r.clause == DetectorClause::NONE ? kNaN : r.records.back().t;
}

SweepRow make_row(double A, const RunResult& r, double fit_delta, double T, bool keep_snapshot) {
  SweepRow row;
  row.amplitude = A;
  row.termination = r.termination;
  row.clause = r.clause;
  row.sup_l2_dev = r.sup_l2_dev;
  row.blowup_time = detection_time(r);
  row.final_time = r.final_state.t;
  row.steps = r.steps;
  row.kappa = r.termination == Termination::COMPLETED ? fit_decay_rate(r.records, fit_delta, T) : kNaN;
  row.records = r.records;
  if (keep_snapshot) row.final_snapshot = SnapshotData{r.final_state.rho, r.final_state.t, r.final_state.mean};
  return row;
}

double fit_delta_of(const RunConfig& cfg, double T) {
  return cfg.scenario.relax_delta ? *cfg.scenario.relax_delta : 0.1 * T;
}

std::string sweep_csv(const SweepResult& s) {
  std::string out = "amplitude,status,clause,sup_l2_dev,kappa,blowup_time,final_time,steps\n";
  for (const auto& r : s.rows) {
    out += format_real(r.amplitude) + "," + to_string(r.termination) + "," + to_string(r.clause) + "," +
           format_real(r.sup_l2_dev) + "," + real_or_na(r.kappa) + "," + real_or_na(r.blowup_time) + "," +
           format_real(r.final_time) + "," + std::to_string(r.steps) + "\n";
  }
  return out;
}

void add_row_files(const SweepResult& s, bool snapshots, std::vector<OutputFile>& files) {
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    files.push_back({index_name("series", i, ".csv"), records_csv(s.rows[i].records)});
    if (snapshots && s.rows[i].final_snapshot) {
      const auto& snap = *s.rows[i].final_snapshot;
      files.push_back({index_name("final", i, ".ksmx"), encode_snapshot(snap.field, snap.time)});
    }
  }
}

std::string verdict_file(const ScenarioReport& rep, const std::vector<std::string>& notes) {
  std::string out = "# scenario " + scenario_name(rep.scenario) + "\n";
  for (const auto& n : notes) out += "# " + n + "\n";
  for (const auto& v : rep.verdicts) out += verdict_line(v) + "\n";
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int finest_level(const Grid& g) {
  int L = 0;
  while ((2 << L) <= g.n / 4) ++L;
  return L;
}

ScalarField minus_mean(const ScalarField& f) {
  const double m = f.mean();
  std::vector<double> v = f.values();
  for (double& x : v) x -= m;
  return ScalarField(f.grid(), std::move(v));
}

}  // namespace

bool ScenarioReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

double fit_decay_rate(const std::vector<DiagnosticsRecord>& records, double delta, double T) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (const auto& r : records) {
    if (r.t < delta || r.t > T || !(r.l2_dev > 0.0)) continue;
    const double y = std::log(r.l2_dev);
    sx += r.t;
    sy += y;
    sxx += r.t * r.t;
    sxy += r.t * y;
    ++count;
  }
  if (count < 2) return kNaN;
  const double c = static_cast<double>(count);
  const double den = c * sxx - sx * sx;
  if (!(den > 0.0)) return kNaN;
  return -(c * sxy - sx * sy) / den;
}

bool nonincreasing_with_tolerance(const std::vector<double>& v, double tolerance) {
  int rises = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) continue;
    if (v[i] > v[i - 1] * (1.0 + tolerance)) return false;
    if (++rises > 1) return false;
  }
  return true;
}

bool decreasing_with_tolerance(const std::vector<double>& v, double tolerance) {
  int rises = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) continue;
    if (v[i] > v[i - 1] * (1.0 + tolerance)) return false;
    if (++rises > 1) return false;
  }
  return true;
}

BlowupResult scenario_blowup_baseline(const RunConfig& cfg) {
  validate_config(cfg);
  const Grid g = config_grid(cfg);
  const ScalarField rho0 = build_initial(cfg, g);
  const FlowSpec flow = build_flow(cfg, g);
  const double T = cfg.scenario.horizon.value_or(kDefaultHorizon);
  const ScalarField phi = radial_cutoff(g, cfg.scenario.cutoff_radius);

  BlowupResult out;
  RunOptions opts = run_options(cfg);
  opts.observer = [&](const SimState& s) {
    const SecondMomentRate m = second_moment_rate(s.rho, phi, s.mean);
    out.second_moment.push_back({s.t, m.rate, m.leading_term});
  };
  const RunResult r = run_simulation(rho0, flow, T, cfg.stepper, opts);
  const double A = cfg.flow.kind == FlowChoice::ZERO ? 0.0 : 1.0;
  out.sweep.rows.push_back(make_row(A, r, fit_delta_of(cfg, T), T, cfg.scenario.snapshots));
  out.sweep.horizon = T;
  out.sweep.B = cfg.scenario.B.value_or(initial_l2_dev(rho0));
  out.sweep.baseline_time = out.sweep.rows.front().blowup_time;
  const auto& row = out.sweep.rows.front();
  if (row.termination == Termination::COMPLETED && row.sup_l2_dev <= 2.0 * out.sweep.B) out.sweep.a0_hat = A;

  out.compare_time = kNaN;
  if (cfg.scenario.compare_resolution != 0) {
    RunConfig other = cfg;
    other.n = cfg.scenario.compare_resolution;
    const Grid g2 = config_grid(other);
    RunOptions o2 = run_options(other);
    o2.diag_stride = std::max(o2.diag_stride, 1 << 20);
    const RunResult r2 = run_simulation(build_initial(other, g2), build_flow(other, g2), T, other.stepper, o2);
    out.compare_time = detection_time(r2);
  }
  return out;
}

SweepResult scenario_suppression_sweep(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.scenario.amplitudes.empty()) throw ConfigError("suppress needs scenario.amplitudes");
  const Grid g = config_grid(cfg);
  const ScalarField rho0 = build_initial(cfg, g);
  const FlowSpec base = build_flow(cfg, g);
  SweepResult out;
  const double l2_0 = initial_l2_dev(rho0);
  out.B = cfg.scenario.B.value_or(l2_0 > 0.0 ? l2_0 : 1.0);
  out.baseline_time = kNaN;
  if (cfg.scenario.horizon) {
    out.horizon = *cfg.scenario.horizon;
  } else {
    RunOptions o = run_options(cfg);
    o.diag_stride = 1 << 20;
    const RunResult base_run =
        run_simulation(rho0, make_zero_flow(cfg.dim), cfg.scenario.baseline_horizon, cfg.stepper, o);
    out.baseline_time = detection_time(base_run);
    out.horizon = std::isnan(out.baseline_time) ? cfg.scenario.baseline_horizon
                                                : cfg.scenario.baseline_factor * out.baseline_time;
  }
  const double delta = fit_delta_of(cfg, out.horizon);
  for (double A : cfg.scenario.amplitudes) {
    const RunResult r = run_simulation(rho0, scale_amplitude(base, A), out.horizon, cfg.stepper, run_options(cfg));
    out.rows.push_back(make_row(A, r, delta, out.horizon, cfg.scenario.snapshots));
    const SweepRow& row = out.rows.back();
    if (!out.a0_hat && row.termination == Termination::COMPLETED && row.sup_l2_dev <= 2.0 * out.B) {
      out.a0_hat = A;
    }
  }
  return out;
}

SweepResult scenario_relaxation_rate(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.scenario.amplitudes.empty()) throw ConfigError("relax needs scenario.amplitudes");
  const Grid g = config_grid(cfg);
  const ScalarField rho0 = build_initial(cfg, g);
  const FlowSpec base = build_flow(cfg, g);
  SweepResult out;
  out.horizon = cfg.scenario.horizon.value_or(kDefaultHorizon);
  const double l2_0 = initial_l2_dev(rho0);
  out.B = cfg.scenario.B.value_or(l2_0 > 0.0 ? l2_0 : 1.0);
  out.baseline_time = kNaN;
  const double delta = fit_delta_of(cfg, out.horizon);
  for (double A : cfg.scenario.amplitudes) {
    const RunResult r = run_simulation(rho0, scale_amplitude(base, A), out.horizon, cfg.stepper, run_options(cfg));
    out.rows.push_back(make_row(A, r, delta, out.horizon, cfg.scenario.snapshots));
    const SweepRow& row = out.rows.back();
    if (!out.a0_hat && row.termination == Termination::COMPLETED && row.sup_l2_dev <= 2.0 * out.B) {
      out.a0_hat = A;
    }
  }
  return out;
}

std::vector<ApproximationRow> scenario_approximation_check(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.scenario.amplitudes.empty()) throw ConfigError("approx needs scenario.amplitudes");
  if (!cfg.scenario.window) throw ConfigError("approx needs scenario.window");
  const bool zero_flow = cfg.flow.kind == FlowChoice::ZERO;
  for (double A : cfg.scenario.amplitudes) {
    if (!zero_flow && !(A > 0.0)) throw ConfigError("approx amplitudes must be > 0");
  }
  const Grid g = config_grid(cfg);
  const ScalarField rho0 = build_initial(cfg, g);
  const FlowSpec base = build_flow(cfg, g);
  std::vector<ApproximationRow> out;
  for (double A : cfg.scenario.amplitudes) {
    ApproximationRow row;
    row.amplitude = A;
    row.window = zero_flow ? *cfg.scenario.window : *cfg.scenario.window / A;
    row.sup_distance = paired_run(rho0, scale_amplitude(base, A), row.window, cfg.stepper, cfg.scenario.samples)
                           .sup_distance;
    out.push_back(row);
  }
  return out;
}

MixingBenchResult scenario_mixing_bench(const RunConfig& cfg) {
  validate_config(cfg);
  const Grid g = config_grid(cfg);
  ScalarField f = build_initial(cfg, g);
  const FlowSpec flow = build_flow(cfg, g);
  const double period = cfg.flow.levels * cfg.flow.per_level_time;
  const double T = cfg.scenario.horizon.value_or(period);
  const double lip = flow.declared_lipschitz > 0.0 ? flow.declared_lipschitz : 1.0;
  const double dt = cfg.stepper.transport_cfl / lip;
  const int Lmax = finest_level(g);

  MixingBenchResult out;
  out.trace_level = std::min(cfg.flow.levels, Lmax);
  out.f0_linf = lp_norm(f, std::numeric_limits<double>::infinity());
  std::vector<double> eps = cfg.scenario.eps_targets;
  for (double e : eps) {
    MixingTarget tg;
    tg.epsilon = e;
    tg.time = kNaN;
    tg.level = static_cast<int>(std::ceil(std::abs(std::log2(e * e)))) + 2;
    tg.level_used = std::min(tg.level, Lmax);
    out.targets.push_back(tg);
  }

  auto observe = [&](double t) {
    const ScalarField dev = minus_mean(f);
    const double hm1 = sobolev_norm(f, -1.0, NormConvention::PAPER);
    const double mix = cell_mixedness(f, out.trace_level).mixedness;
    out.trace.push_back({t, hm1, mix});
    for (auto& tg : out.targets) {
      if (!std::isnan(tg.time) || hm1 > tg.epsilon * out.f0_linf) continue;
      tg.time = t;
      tg.mixedness = cell_mixedness(f, tg.level_used).mixedness;
      tg.duality_ratio = out.f0_linf > 0.0 ? duality_bound_check(dev, tg.level_used).ratio : 0.0;
    }
    return hm1;
  };

  double t = 0.0;
  out.stage_hm1.emplace_back(0.0, observe(0.0));
  int stage = 1;
  while (t < T) {
    const double boundary = stage * cfg.flow.per_level_time;
    double t_next = std::min({t + dt, T, boundary});
    f = transport_step(f, flow, t, t_next - t);
    t = t_next;
    const double hm1 = observe(t);
    if (t == boundary) {
      out.stage_hm1.emplace_back(t, hm1);
      ++stage;
    }
  }
  return out;
}

std::vector<InequalitySpec> standard_inequalities() {
  return {gagliardo_nirenberg(1, 4.0, 2),
          gagliardo_nirenberg(0, std::numeric_limits<double>::infinity(), 2),
          nash(0.0),
          nash(1.0),
          gn_vanishing(3.0, 2.0),
          gn_vanishing(4.0, 1.0),
          sobolev_interpolation(1.0),
          sobolev_interpolation(2.0)};
}

IneqSuiteResult scenario_ineq_suite(const RunConfig& cfg) {
  validate_config(cfg);
  std::vector<int> res = cfg.scenario.resolutions;
  if (res.empty()) res = {cfg.n, std::min(2 * cfg.n, 2048)};
  const auto specs = standard_inequalities();
  for (const auto& s : specs) check_admissible(s, cfg.dim);
  IneqSuiteResult out;
  for (int n : res) {
    const Grid g = make_grid(cfg.dim, n);
    std::vector<std::vector<double>> ratios(specs.size());
    for (int i = 0; i < cfg.scenario.ensemble; ++i) {
      const ScalarField f = random_smooth_field(g, cfg.scenario.seed + static_cast<std::uint64_t>(i), cfg.initial.decay);
      for (std::size_t k = 0; k < specs.size(); ++k) ratios[k].push_back(inequality_ratio(f, specs[k]));
    }
    for (std::size_t k = 0; k < specs.size(); ++k) {
      IneqRow row;
      row.spec = specs[k];
      row.n = n;
      row.finite = std::all_of(ratios[k].begin(), ratios[k].end(), [](double x) { return std::isfinite(x); });
      row.max_ratio = *std::max_element(ratios[k].begin(), ratios[k].end());
      row.median_ratio = median(ratios[k]);
      out.rows.push_back(row);
    }
  }
  const Grid g0 = make_grid(cfg.dim, res.front());
  const int probes = std::min(cfg.scenario.ensemble, 16);
  for (int i = 0; i < probes; ++i) {
    const ScalarField f = random_smooth_field(g0, cfg.scenario.seed + static_cast<std::uint64_t>(i), cfg.initial.decay);
    for (double lambda : {1e-3, 7.5}) {
      const ScalarField lf = f * lambda;
      for (const auto& s : specs) {
        const double a = inequality_ratio(f, s);
        const double b = inequality_ratio(lf, s);
        out.homogeneity_error = std::max(out.homogeneity_error, std::abs(a - b) / std::max(std::abs(a), 1e-300));
      }
    }
  }
  return out;
}

namespace {

ScenarioReport report_run(const RunConfig& cfg) {
  ScenarioReport rep;
  rep.scenario = cfg.scenario.name;
  const Grid g = config_grid(cfg);
  const ScalarField rho0 = build_initial(cfg, g);
  const double A = cfg.scenario.amplitudes.empty() ? 1.0 : cfg.scenario.amplitudes.front();
  const FlowSpec flow = scale_amplitude(build_flow(cfg, g), A);
  const double T = cfg.scenario.horizon.value_or(kDefaultHorizon);
  const RunResult r = run_simulation(rho0, flow, T, cfg.stepper, run_options(cfg));
  const double m0 = r.records.front().mass;
  double drift = 0.0;
  bool crit_ok = true;
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    drift = std::max(drift, std::abs(r.records[i].mass - m0));
    if (i && r.records[i].criterion_integral < r.records[i - 1].criterion_integral) crit_ok = false;
  }
  const double scale = std::max(std::abs(m0), r.records.front().l2_dev);
  const double rel = scale > 0.0 ? drift / scale : drift;
  rep.verdicts.push_back({"mass_conservation", rel <= 1e-10,
                          "relative drift " + num(rel) + " over " + std::to_string(r.steps) + " steps, tolerance 1e-10"});
  rep.verdicts.push_back({"criterion_integral_nondecreasing", crit_ok, "no tolerance"});
  rep.numerical_abort = r.termination == Termination::OVERFLOW;
  rep.files.push_back({"series.csv", records_csv(r.records)});
  if (cfg.scenario.snapshots) {
    rep.files.push_back({"initial.ksmx", encode_snapshot(rho0, 0.0)});
    rep.files.push_back({"final.ksmx", encode_snapshot(r.final_state.rho, r.final_state.t)});
  }
  rep.files.push_back({"verdict.txt", verdict_file(rep, {"termination " + to_string(r.termination) + " clause " +
                                                         to_string(r.clause) + " at t = " + num(r.final_state.t)})});
  return rep;
}

ScenarioReport report_blowup(const RunConfig& cfg) {
  ScenarioReport rep;
  rep.scenario = cfg.scenario.name;
  const BlowupResult b = scenario_blowup_baseline(cfg);
  const SweepRow& row = b.sweep.rows.front();
  const double mass = row.records.front().mass;
  const bool supercritical = mass > kCriticalMass2D;
  const std::string mass_note = "mass " + num(mass) + " vs critical 8*pi = " + num(kCriticalMass2D);
  if (supercritical) {
    rep.verdicts.push_back({"detector_fires", row.clause != DetectorClause::NONE,
                            mass_note + "; clause " + to_string(row.clause) + " at t = " + real_or_na(row.blowup_time)});
    const double rate0 = b.second_moment.empty() ? kNaN : b.second_moment.front()[1];
    rep.verdicts.push_back({"second_moment_rate_negative_at_t0", rate0 < 0.0, "rate(0) = " + num(rate0) + " < 0"});
  } else {
    rep.verdicts.push_back({"detector_silent", row.clause == DetectorClause::NONE &&
                                                   row.termination == Termination::COMPLETED,
                            mass_note + "; status " + to_string(row.termination)});
    std::vector<double> l2;
    for (const auto& r : row.records) l2.push_back(r.l2_dev);
    bool mono = true;
    for (std::size_t i = 1; i < l2.size(); ++i) mono = mono && l2[i] <= l2[i - 1] * (1.0 + 1e-12);
    rep.verdicts.push_back({"l2_monotone_decay", mono, "l2_dev non-increasing, relative tolerance 1e-12"});
  }
  if (cfg.scenario.compare_resolution != 0) {
    const double t1 = row.blowup_time, t2 = b.compare_time;
    const bool ok = std::isfinite(t1) && std::isfinite(t2) && std::abs(t1 - t2) <= 0.1 * std::max(t1, t2);
    rep.verdicts.push_back({"detection_time_refinement", ok,
                            "n = " + std::to_string(cfg.n) + ": " + real_or_na(t1) + ", n = " +
                                std::to_string(cfg.scenario.compare_resolution) + ": " + real_or_na(t2) +
                                ", tolerance 10% of the larger"});
  }
  rep.numerical_abort = false;
  std::string sm = "t,rate,leading_term\n";
  for (const auto& e : b.second_moment) sm += format_real(e[0]) + "," + format_real(e[1]) + "," + format_real(e[2]) + "\n";
  rep.files.push_back({"second_moment.csv", sm});
  rep.files.push_back({"summary.csv", sweep_csv(b.sweep)});
  rep.files.push_back({"series.csv", records_csv(row.records)});
  if (cfg.scenario.snapshots && row.final_snapshot) {
    rep.files.push_back({"final.ksmx", encode_snapshot(row.final_snapshot->field, row.final_snapshot->time)});
  }
  rep.files.push_back({"verdict.txt", verdict_file(rep, {"status " + to_string(row.termination) + ", blow-up time " +
                                                         real_or_na(row.blowup_time)})});
  return rep;
}

ScenarioReport report_suppress(const RunConfig& cfg) {
  ScenarioReport rep;
  rep.scenario = cfg.scenario.name;
  const SweepResult s = scenario_suppression_sweep(cfg);
  std::vector<double> sups;
  for (const auto& r : s.rows) sups.push_back(r.sup_l2_dev);
  rep.verdicts.push_back({"suppressing_amplitude_found", s.a0_hat.has_value(),
                          "least amplitude completing the horizon " + num(s.horizon) + " with sup l2_dev <= 2B = " +
                              num(2.0 * s.B) + ": " + (s.a0_hat ? num(*s.a0_hat) : std::string("none"))});
  rep.verdicts.push_back({"sup_l2_nonincreasing_in_amplitude", nonincreasing_with_tolerance(sups, 0.05),
                          "sup l2_dev " + list(sups) + ", tolerance: at most one rise of at most 5%"});
  std::vector<std::string> notes = {
      "horizon " + num(s.horizon) + (std::isnan(s.baseline_time)
                                         ? std::string(" (configured or baseline did not fire)")
                                         : " = " + num(cfg.scenario.baseline_factor) + " x zero-flow detection time " +
                                               num(s.baseline_time)),
      "B = " + num(s.B)};
  rep.files.push_back({"summary.csv", sweep_csv(s)});
  add_row_files(s, cfg.scenario.snapshots, rep.files);
  rep.files.push_back({"verdict.txt", verdict_file(rep, notes)});
  return rep;
}

ScenarioReport report_relax(const RunConfig& cfg) {
  ScenarioReport rep;
  rep.scenario = cfg.scenario.name;
  const SweepResult s = scenario_relaxation_rate(cfg);
  std::vector<double> kappas;
  std::size_t flagged = 0;
  for (const auto& r : s.rows) {
    if (std::isnan(r.kappa)) {
      ++flagged;
      continue;
    }
    kappas.push_back(r.kappa);
  }
  bool mono = true;
  for (std::size_t i = 1; i < kappas.size(); ++i) mono = mono && kappas[i] >= kappas[i - 1];
  rep.verdicts.push_back({"kappa_nondecreasing_in_amplitude", mono,
                          "kappa " + list(kappas) + " over completing rows (" + std::to_string(flagged) +
                              " rows flagged not applicable), no tolerance"});
  rep.files.push_back({"summary.csv", sweep_csv(s)});
  add_row_files(s, cfg.scenario.snapshots, rep.files);
  rep.files.push_back({"verdict.txt", verdict_file(rep, {"fit window [" + num(fit_delta_of(cfg, s.horizon)) + ", " +
                                                         num(s.horizon) + "]"})});
  return rep;
}

ScenarioReport report_approx(const RunConfig& cfg) {
  ScenarioReport rep;
  rep.scenario = cfg.scenario.name;
  const auto rows = scenario_approximation_check(cfg);
  std::vector<double> d;
  std::string csv = "amplitude,window,sup_distance\n";
  for (const auto& r : rows) {
    d.push_back(r.sup_distance);
    csv += format_real(r.amplitude) + "," + format_real(r.window) + "," + format_real(r.sup_distance) + "\n";
  }
  const double peak = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
  if (cfg.flow.kind == FlowChoice::ZERO) {
    const bool same = std::all_of(d.begin(), d.end(), [&](double x) { return x == d.front(); });
    rep.verdicts.push_back({"zero_flow_distance_independent_of_amplitude", same, "distances " + list(d) + ", exact"});
  } else if (peak == 0.0) {
    rep.verdicts.push_back({"distance_decreasing_in_amplitude", true, "all distances are zero"});
  } else {
    rep.verdicts.push_back({"distance_decreasing_in_amplitude", decreasing_with_tolerance(d, 0.05),
                            "sup distance " + list(d) + ", tolerance: at most one rise of at most 5%"});
  }
  rep.files.push_back({"approx.csv", csv});
  rep.files.push_back({"verdict.txt", verdict_file(rep, {"flow-time window " + num(*cfg.scenario.window)})});
  return rep;
}

ScenarioReport report_mixbench(const RunConfig& cfg) {
  ScenarioReport rep;
  rep.scenario = cfg.scenario.name;
  const MixingBenchResult m = scenario_mixing_bench(cfg);
  std::vector<double> stages;
  for (const auto& s : m.stage_hm1) stages.push_back(s.second);
  bool mono = true;
  for (std::size_t i = 1; i < stages.size(); ++i) mono = mono && stages[i] <= stages[i - 1] * (1.0 + 1e-12);
  rep.verdicts.push_back({"hm1_decreasing_across_stage_boundaries", mono,
                          "hm1 at stage boundaries " + list(stages) + ", relative tolerance 1e-12"});
  const double h0 = m.trace.front()[1], h1 = m.trace.back()[1];
  rep.verdicts.push_back({"hm1_reduced_fourfold", h1 <= 0.25 * h0,
                          "final " + num(h1) + " vs initial " + num(h0) + ", need final <= 0.25 x initial"});
  bool dual_ok = true;
  std::size_t reached = 0;
  std::string table = "epsilon,time,log2_epsilon,log2_time,level,level_used,mixedness,duality_ratio\n";
  for (const auto& tg : m.targets) {
    table += format_real(tg.epsilon) + "," + real_or_na(tg.time) + "," + format_real(std::log2(tg.epsilon)) + "," +
             real_or_na(tg.time > 0.0 ? std::log2(tg.time) : kNaN) + "," + std::to_string(tg.level) + "," +
             std::to_string(tg.level_used) + "," + real_or_na(std::isnan(tg.time) ? kNaN : tg.mixedness) + "," +
             real_or_na(std::isnan(tg.time) ? kNaN : tg.duality_ratio) + "\n";
    if (std::isnan(tg.time)) continue;
    ++reached;
    dual_ok = dual_ok && tg.duality_ratio <= 1.0;
  }
  rep.verdicts.push_back({"duality_cross_check", dual_ok,
                          std::to_string(reached) + " targets reached; hm1 <= ||f||_inf max(2^-level, mixedness) at "
                                                    "each, constant 1"});
  std::string trace = "t,hm1,mixedness\n";
  for (const auto& e : m.trace) trace += format_real(e[0]) + "," + format_real(e[1]) + "," + format_real(e[2]) + "\n";
  std::string st = "t,hm1\n";
  for (const auto& s : m.stage_hm1) st += format_real(s.first) + "," + format_real(s.second) + "\n";
  rep.files.push_back({"trace.csv", trace});
  rep.files.push_back({"stages.csv", st});
  rep.files.push_back({"table.csv", table});
  rep.files.push_back({"verdict.txt", verdict_file(rep, {"mixedness trace at level " + std::to_string(m.trace_level)})});
  return rep;
}

ScenarioReport report_ineq(const RunConfig& cfg) {
  ScenarioReport rep;
  rep.scenario = cfg.scenario.name;
  const IneqSuiteResult s = scenario_ineq_suite(cfg);
  std::string csv = "inequality,n,max_ratio,median_ratio,finite\n";
  for (const auto& r : s.rows) {
    csv += "\"" + describe(r.spec) + "\"," + std::to_string(r.n) + "," + format_real(r.max_ratio) + "," +
           format_real(r.median_ratio) + "," + (r.finite ? "true" : "false") + "\n";
  }
  const auto specs = standard_inequalities();
  for (std::size_t k = 0; k < specs.size(); ++k) {
    std::vector<double> maxima;
    bool finite = true;
    for (const auto& r : s.rows) {
      if (describe(r.spec) != describe(specs[k])) continue;
      maxima.push_back(r.max_ratio);
      finite = finite && r.finite && std::isfinite(r.max_ratio);
    }
    const double hi = *std::max_element(maxima.begin(), maxima.end());
    const double lo = *std::min_element(maxima.begin(), maxima.end());
    const double factor = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    rep.verdicts.push_back({describe(specs[k]), finite && factor <= 2.0,
                            "max ratios " + list(maxima) + ", stability factor " + num(factor) + " <= 2, finite"});
  }
  rep.verdicts.push_back({"homogeneity", s.homogeneity_error <= 1e-10,
                          "largest relative change under f -> lambda f: " + num(s.homogeneity_error) +
                              ", tolerance 1e-10"});
  rep.files.push_back({"ineq.csv", csv});
  rep.files.push_back({"verdict.txt", verdict_file(rep, {"ensemble " + std::to_string(cfg.scenario.ensemble)})});
  return rep;
}

}  // namespace

ScenarioReport run_scenario(const RunConfig& cfg) {
  validate_config(cfg);
  ScenarioReport rep;
  switch (cfg.scenario.name) {
    case Scenario::RUN: rep = report_run(cfg); break;
    case Scenario::BLOWUP_BASELINE: rep = report_blowup(cfg); break;
    case Scenario::SUPPRESSION_SWEEP: rep = report_suppress(cfg); break;
    case Scenario::RELAXATION_RATE: rep = report_relax(cfg); break;
    case Scenario::APPROXIMATION_CHECK: rep = report_approx(cfg); break;
    case Scenario::MIXING_BENCH: rep = report_mixbench(cfg); break;
    case Scenario::INEQ_SUITE: rep = report_ineq(cfg); break;
  }
  rep.scenario = cfg.scenario.name;
  rep.files.push_back({"config.cfg", serialize_config(cfg)});
  return rep;
}

}  // namespace ksmix
