#include "ksmix/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "ksmix/initdata.hpp"
#include "ksmix/spectral.hpp"

namespace ksmix {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty()) {
    fail_line(line, "key '" + key + "' expects a real number, got '" + v + "'");
  }
  return x;
}

long long parse_int(const std::string& v, int line, const std::string& key) {
  long long x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty()) {
    fail_line(line, "key '" + key + "' expects an integer, got '" + v + "'");
  }
  return x;
}

std::uint64_t parse_u64(const std::string& v, int line, const std::string& key) {
  std::uint64_t x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty()) {
    fail_line(line, "key '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return x;
}

int parse_int32(const std::string& v, int line, const std::string& key) {
  const long long x = parse_int(v, line, key);
  if (x < -2147483647LL || x > 2147483647LL) fail_line(line, "key '" + key + "' is out of range");
  return static_cast<int>(x);
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail_line(line, "key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    out.push_back(trim(std::string_view(v).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& v, int line, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_double(item, line, key));
  return out;
}

std::vector<int> parse_int_list(const std::string& v, int line, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : split_list(v)) out.push_back(parse_int32(item, line, key));
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      s += fmt(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s;
}

template <class E>
E parse_enum(const std::string& v, const std::vector<std::pair<std::string, E>>& names, int line,
             const std::string& key) {
  for (const auto& [name, e] : names) {
    if (name == v) return e;
  }
  std::string allowed;
  for (const auto& [name, e] : names) allowed += (allowed.empty() ? "" : ", ") + name;
  fail_line(line, "key '" + key + "' expects one of {" + allowed + "}, got '" + v + "'");
}

template <class E>
std::string enum_name(E e, const std::vector<std::pair<std::string, E>>& names) {
  for (const auto& [name, x] : names) {
    if (x == e) return name;
  }
  return "?";
}

const std::vector<std::pair<std::string, Scenario>> kScenarioNames = {
    {"run", Scenario::RUN},
    {"blowup", Scenario::BLOWUP_BASELINE},
    {"suppress", Scenario::SUPPRESSION_SWEEP},
    {"relax", Scenario::RELAXATION_RATE},
    {"approx", Scenario::APPROXIMATION_CHECK},
    {"mixbench", Scenario::MIXING_BENCH},
    {"ineq", Scenario::INEQ_SUITE},
};

const std::vector<std::pair<std::string, InitialKind>> kInitialNames = {
    {"gaussian", InitialKind::GAUSSIAN},
    {"random", InitialKind::RANDOM},
    {"sine", InitialKind::SINE},
    {"constant", InitialKind::CONSTANT},
};

const std::vector<std::pair<std::string, FlowChoice>> kFlowNames = {
    {"zero", FlowChoice::ZERO},   {"uniform", FlowChoice::UNIFORM}, {"shear", FlowChoice::SHEAR},
    {"cellular", FlowChoice::CELLULAR}, {"mixer", FlowChoice::MIXER},
};

struct Field {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&, int)> set;
  /// Empty optional: the field is omitted from serialized output.
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

#define KS_REAL(sec, name, expr)                                                                         \
  Field {                                                                                                \
    sec, #name, [](RunConfig& c, const std::string& v, int l) { c.expr = parse_double(v, l, #name); }, \
        [](const RunConfig& c) { return std::optional<std::string>(fmt(c.expr)); }                       \
  }
#define KS_INT(sec, name, expr)                                                                          \
  Field {                                                                                                \
    sec, #name, [](RunConfig& c, const std::string& v, int l) { c.expr = parse_int32(v, l, #name); },  \
        [](const RunConfig& c) { return std::optional<std::string>(std::to_string(c.expr)); }            \
  }
#define KS_U64(sec, name, expr)                                                                          \
  Field {                                                                                                \
    sec, #name, [](RunConfig& c, const std::string& v, int l) { c.expr = parse_u64(v, l, #name); },    \
        [](const RunConfig& c) { return std::optional<std::string>(std::to_string(c.expr)); }            \
  }
#define KS_BOOL(sec, name, expr)                                                                         \
  Field {                                                                                                \
    sec, #name, [](RunConfig& c, const std::string& v, int l) { c.expr = parse_bool(v, l, #name); },   \
        [](const RunConfig& c) { return std::optional<std::string>(c.expr ? "true" : "false"); }         \
  }
#define KS_OPT_REAL(sec, name, expr)                                                                     \
  Field {                                                                                                \
    sec, #name, [](RunConfig& c, const std::string& v, int l) { c.expr = parse_double(v, l, #name); }, \
        [](const RunConfig& c) {                                                                         \
          return c.expr ? std::optional<std::string>(fmt(*c.expr)) : std::nullopt;                       \
        }                                                                                                \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      KS_INT("grid", dim, dim),
      KS_INT("grid", n, n),

      Field{"initial", "kind",
            [](RunConfig& c, const std::string& v, int l) { c.initial.kind = parse_enum(v, kInitialNames, l, "kind"); },
            [](const RunConfig& c) { return std::optional<std::string>(enum_name(c.initial.kind, kInitialNames)); }},
      KS_REAL("initial", mass, initial.mass),
      KS_REAL("initial", width, initial.width),
      Field{"initial", "center",
            [](RunConfig& c, const std::string& v, int l) {
              const auto xs = parse_double_list(v, l, "center");
              if (xs.size() < 2 || xs.size() > 3) fail_line(l, "key 'center' expects 2 or 3 reals");
              c.initial.center = {xs[0], xs[1], xs.size() == 3 ? xs[2] : 0.0};
            },
            [](const RunConfig& c) {
              return std::optional<std::string>(
                  join(std::vector<double>{c.initial.center[0], c.initial.center[1], c.initial.center[2]}));
            }},
      KS_REAL("initial", background, initial.background),
      KS_REAL("initial", amplitude, initial.amplitude),
      KS_REAL("initial", decay, initial.decay),
      Field{"initial", "mode",
            [](RunConfig& c, const std::string& v, int l) {
              const auto ks = parse_int_list(v, l, "mode");
              if (ks.size() < 2 || ks.size() > 3) fail_line(l, "key 'mode' expects 2 or 3 integers");
              c.initial.mode = {ks[0], ks[1], ks.size() == 3 ? ks[2] : 0};
            },
            [](const RunConfig& c) {
              return std::optional<std::string>(
                  join(std::vector<int>{c.initial.mode[0], c.initial.mode[1], c.initial.mode[2]}));
            }},

      Field{"flow", "kind",
            [](RunConfig& c, const std::string& v, int l) { c.flow.kind = parse_enum(v, kFlowNames, l, "kind"); },
            [](const RunConfig& c) { return std::optional<std::string>(enum_name(c.flow.kind, kFlowNames)); }},
      KS_INT("flow", m, flow.m),
      KS_REAL("flow", switch_time, flow.switch_time),
      KS_U64("flow", phase_seed, flow.phase_seed),
      KS_INT("flow", levels, flow.levels),
      KS_REAL("flow", per_level_time, flow.per_level_time),
      Field{"flow", "velocity",
            [](RunConfig& c, const std::string& v, int l) { c.flow.velocity = parse_double_list(v, l, "velocity"); },
            [](const RunConfig& c) { return std::optional<std::string>(join(c.flow.velocity)); }},
      KS_REAL("flow", mollify, flow.mollify),

      KS_REAL("stepper", dt_max, stepper.dt_max),
      KS_REAL("stepper", cfl, stepper.cfl),
      KS_REAL("stepper", dealias_fraction, stepper.dealias_fraction),
      KS_REAL("stepper", negative_tolerance, stepper.negative_tolerance),
      KS_REAL("stepper", hyperdiffusion_for_transport, stepper.hyperdiffusion_for_transport),
      KS_BOOL("stepper", chemotaxis, stepper.chemotaxis),
      KS_BOOL("stepper", reaction_limit, stepper.reaction_limit),
      KS_REAL("stepper", transport_cfl, stepper.transport_cfl),

      KS_REAL("detector", criterion_cap, detector.criterion_cap),
      KS_REAL("detector", h1_cap, detector.h1_cap),
      KS_REAL("detector", tail_cap, detector.tail_cap),
      KS_REAL("detector", neg_cap, detector.neg_cap),

      Field{"scenario", "name",
            [](RunConfig& c, const std::string& v, int l) {
              c.scenario.name = parse_enum(v, kScenarioNames, l, "name");
            },
            [](const RunConfig& c) { return std::optional<std::string>(enum_name(c.scenario.name, kScenarioNames)); }},
      Field{"scenario", "amplitudes",
            [](RunConfig& c, const std::string& v, int l) {
              c.scenario.amplitudes = parse_double_list(v, l, "amplitudes");
              if (!std::is_sorted(c.scenario.amplitudes.begin(), c.scenario.amplitudes.end())) {
                fail_line(l, "key 'amplitudes' must be sorted ascending");
              }
            },
            [](const RunConfig& c) {
              return c.scenario.amplitudes.empty() ? std::nullopt
                                                   : std::optional<std::string>(join(c.scenario.amplitudes));
            }},
      KS_OPT_REAL("scenario", horizon, scenario.horizon),
      KS_OPT_REAL("scenario", B, scenario.B),
      KS_REAL("scenario", C0, scenario.C0),
      KS_REAL("scenario", C1, scenario.C1),
      KS_REAL("scenario", baseline_factor, scenario.baseline_factor),
      KS_REAL("scenario", baseline_horizon, scenario.baseline_horizon),
      Field{"scenario", "output", [](RunConfig& c, const std::string& v, int) { c.scenario.output = v; },
            [](const RunConfig& c) { return std::optional<std::string>(c.scenario.output); }},
      KS_U64("scenario", seed, scenario.seed),
      KS_INT("scenario", diag_stride, scenario.diag_stride),
      KS_INT("scenario", pn_radius, scenario.pn_radius),
      KS_OPT_REAL("scenario", relax_delta, scenario.relax_delta),
      KS_OPT_REAL("scenario", window, scenario.window),
      KS_INT("scenario", samples, scenario.samples),
      KS_REAL("scenario", cutoff_radius, scenario.cutoff_radius),
      KS_INT("scenario", compare_resolution, scenario.compare_resolution),
      KS_INT("scenario", ensemble, scenario.ensemble),
      Field{"scenario", "resolutions",
            [](RunConfig& c, const std::string& v, int l) {
              c.scenario.resolutions = parse_int_list(v, l, "resolutions");
            },
            [](const RunConfig& c) {
              return c.scenario.resolutions.empty() ? std::nullopt
                                                    : std::optional<std::string>(join(c.scenario.resolutions));
            }},
      Field{"scenario", "eps_targets",
            [](RunConfig& c, const std::string& v, int l) {
              c.scenario.eps_targets = parse_double_list(v, l, "eps_targets");
            },
            [](const RunConfig& c) { return std::optional<std::string>(join(c.scenario.eps_targets)); }},
      KS_BOOL("scenario", snapshots, scenario.snapshots),
  };
  return f;
}

#undef KS_REAL
#undef KS_INT
#undef KS_U64
#undef KS_BOOL
#undef KS_OPT_REAL

const std::vector<std::string> kSections = {"grid", "initial", "flow", "stepper", "detector", "scenario"};

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::RUN: return "RUN";
    case Scenario::BLOWUP_BASELINE: return "BLOWUP_BASELINE";
    case Scenario::SUPPRESSION_SWEEP: return "SUPPRESSION_SWEEP";
    case Scenario::RELAXATION_RATE: return "RELAXATION_RATE";
    case Scenario::APPROXIMATION_CHECK: return "APPROXIMATION_CHECK";
    case Scenario::MIXING_BENCH: return "MIXING_BENCH";
    case Scenario::INEQ_SUITE: return "INEQ_SUITE";
  }
  return "UNKNOWN";
}

Scenario scenario_from_name(const std::string& name) {
  for (const auto& [n, s] : kScenarioNames) {
    if (n == name) return s;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

std::string scenario_name(Scenario s) { return enum_name(s, kScenarioNames); }

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  int scenario_line = 0;
  std::set<std::string> seen;
  std::map<std::string, const Field*> index;
  for (const Field& f : fields()) index[f.section + "." + f.key] = &f;

  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') fail_line(line, "malformed section header '" + body + "'");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        fail_line(line, "unknown section [" + section + "]");
      }
      if (section == "scenario" && scenario_line == 0) scenario_line = line;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail_line(line, "expected key = value, got '" + body + "'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (section.empty()) fail_line(line, "key '" + key + "' appears before any [section] header");
    const std::string full = section + "." + key;
    const auto it = index.find(full);
    if (it == index.end()) fail_line(line, "unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(full).second) fail_line(line, "duplicate key '" + key + "' in [" + section + "]");
    it->second->set(cfg, value, line);
  }

  const auto missing = [&](const std::string& what, const std::string& why) {
    const int at = scenario_line ? scenario_line : line;
    throw ConfigError("line " + std::to_string(at) + ": missing required field " + what + " (" + why + ")");
  };
  if (!seen.count("scenario.name")) missing("scenario.name", "every config names its scenario");
  const Scenario s = cfg.scenario.name;
  if ((s == Scenario::SUPPRESSION_SWEEP || s == Scenario::RELAXATION_RATE || s == Scenario::APPROXIMATION_CHECK) &&
      cfg.scenario.amplitudes.empty()) {
    missing("scenario.amplitudes", "needed by " + scenario_name(s));
  }
  if (s == Scenario::APPROXIMATION_CHECK && !cfg.scenario.window) {
    missing("scenario.window", "needed by " + scenario_name(s));
  }
  validate_config(cfg);
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  std::string current;
  for (const Field& f : fields()) {
    const auto v = f.get(cfg);
    if (!v) continue;
    if (f.section != current) {
      if (!current.empty()) out += "\n";
      out += "[" + f.section + "]\n";
      current = f.section;
    }
    out += f.key + " = " + *v + "\n";
  }
  return out;
}

std::string config_reference() {
  RunConfig defaults;
  std::string out;
  for (const Field& f : fields()) {
    const auto v = f.get(defaults);
    out += "  " + f.section + "." + f.key + " = " + (v ? *v : std::string("(unset)")) + "\n";
  }
  return out;
}

void validate_config(const RunConfig& cfg) {
  try {
    make_grid(cfg.dim, cfg.n);
    cfg.stepper.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const ScenarioConfig& s = cfg.scenario;
  for (double a : s.amplitudes) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("scenario.amplitudes must be finite and >= 0");
  }
  if (!std::is_sorted(s.amplitudes.begin(), s.amplitudes.end())) {
    throw ConfigError("scenario.amplitudes must be sorted ascending");
  }
  if (s.horizon && !(*s.horizon > 0.0)) throw ConfigError("scenario.horizon must be > 0");
  if (s.B && !(*s.B > 0.0)) throw ConfigError("scenario.B must be > 0");
  if (s.window && !(*s.window > 0.0)) throw ConfigError("scenario.window must be > 0");
  if (s.relax_delta && !(*s.relax_delta >= 0.0)) throw ConfigError("scenario.relax_delta must be >= 0");
  if (s.diag_stride < 1) throw ConfigError("scenario.diag_stride must be >= 1");
  if (s.pn_radius < 0) throw ConfigError("scenario.pn_radius must be >= 0");
  if (s.samples < 1) throw ConfigError("scenario.samples must be >= 1");
  if (s.ensemble < 1) throw ConfigError("scenario.ensemble must be >= 1");
  if (!(s.baseline_factor > 0.0)) throw ConfigError("scenario.baseline_factor must be > 0");
  if (!(s.baseline_horizon > 0.0)) throw ConfigError("scenario.baseline_horizon must be > 0");
  if (!(s.C0 > 0.0) || !(s.C1 > 0.0)) throw ConfigError("scenario.C0 and scenario.C1 must be > 0");
  for (double e : s.eps_targets) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("scenario.eps_targets must lie in (0, 1)");
  }
  if (s.compare_resolution != 0) {
    try {
      make_grid(cfg.dim, s.compare_resolution);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("scenario.compare_resolution: ") + e.what());
    }
  }
  for (int r : s.resolutions) {
    try {
      make_grid(cfg.dim, r);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("scenario.resolutions: ") + e.what());
    }
  }
  if (cfg.flow.kind == FlowChoice::UNIFORM && static_cast<int>(cfg.flow.velocity.size()) != cfg.dim) {
    throw ConfigError("flow.velocity needs exactly dim components");
  }
  if (s.name == Scenario::MIXING_BENCH && cfg.flow.kind != FlowChoice::MIXER) {
    throw ConfigError("the mixbench scenario needs flow.kind = mixer");
  }
  if ((s.name == Scenario::MIXING_BENCH || s.name == Scenario::BLOWUP_BASELINE) && cfg.dim != 2) {
    throw ConfigError(scenario_name(s.name) + " runs in two dimensions only");
  }
}

Grid config_grid(const RunConfig& cfg) { return make_grid(cfg.dim, cfg.n); }

ScalarField build_initial(const RunConfig& cfg, const Grid& grid) {
  const InitialConfig& ic = cfg.initial;
  switch (ic.kind) {
    case InitialKind::GAUSSIAN:
      return gaussian_bump(grid, ic.mass, ic.width, ic.center);
    case InitialKind::RANDOM: {
      const ScalarField f = random_smooth_field(grid, cfg.scenario.seed, ic.decay);
      const double peak = lp_norm(f, std::numeric_limits<double>::infinity());
      std::vector<double> v = f.values();
      for (double& x : v) x = ic.background + ic.amplitude * (peak > 0.0 ? x / peak : 0.0);
      return ScalarField(grid, std::move(v));
    }
    case InitialKind::SINE: {
      const Wavevector k = ic.mode;
      return ScalarField::sample(grid, [&](const Point& x) {
        double ph = 0.0;
        for (int a = 0; a < grid.dim; ++a) ph += k[a] * x[a];
        return ic.background + ic.amplitude * std::sin(2.0 * std::numbers::pi * ph);
      });
    }
    case InitialKind::CONSTANT:
      return ScalarField::constant(grid, ic.background);
  }
  throw ConfigError("unknown initial kind");
}

FlowSpec build_flow(const RunConfig& cfg, const Grid& grid) {
  const FlowConfig& fc = cfg.flow;
  FlowSpec f;
  try {
    switch (fc.kind) {
      case FlowChoice::ZERO:
        f = make_zero_flow(cfg.dim);
        break;
      case FlowChoice::UNIFORM: {
        Point v{0.0, 0.0, 0.0};
        for (int a = 0; a < cfg.dim; ++a) v[a] = fc.velocity.at(a);
        f = make_uniform_flow(cfg.dim, v);
        break;
      }
      case FlowChoice::SHEAR:
        f = make_shear_alternating(fc.m, fc.switch_time, fc.phase_seed, cfg.dim);
        break;
      case FlowChoice::CELLULAR:
        f = make_cellular(fc.m, cfg.dim);
        break;
      case FlowChoice::MIXER:
        f = make_multiscale_mixer(fc.levels, fc.per_level_time, grid);
        break;
    }
    if (fc.mollify > 0.0) f = mollify(f, fc.mollify);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("flow: ") + e.what());
  }
  return f;
}

}  // namespace ksmix
