#include <sys/wait.h>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "ksmix/config.hpp"
#include "ksmix/initdata.hpp"
#include "ksmix/output.hpp"
#include "ksmix/scenarios.hpp"

using namespace ksmix;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ksmix_test_" + name);
  fs::remove_all(p);
  return p;
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(KSMIX_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const Verdict* find_verdict(const ScenarioReport& r, const std::string& name) {
  for (const auto& v : r.verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

const OutputFile* find_file(const ScenarioReport& r, const std::string& name) {
  for (const auto& f : r.files) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const char* kSmallRun =
    "[grid]\nn = 32\n\n[initial]\nkind = random\nbackground = 1\namplitude = 0.5\n\n"
    "[flow]\nkind = cellular\n\n[scenario]\nname = run\namplitudes = 5\nhorizon = 0.002\n";

}  // namespace

TEST_CASE("config parse errors name the key and line") {
  const std::string msg = config_error("[grid]\nn = 64\n\n[scenario]\nname = suppress\namplitide = 1, 2\n");
  CHECK(msg.find("amplitide") != std::string::npos);
  CHECK(msg.find("line 6") != std::string::npos);

  CHECK(config_error("[grid]\nn = 64\n").find("scenario.name") != std::string::npos);
  CHECK(config_error("[scenario]\nname = suppress\n").find("scenario.amplitudes") != std::string::npos);
  CHECK(config_error("[bogus]\n").find("line 1") != std::string::npos);
  CHECK(config_error("[grid]\nn = sixty\n[scenario]\nname = run\n").find("line 2") != std::string::npos);
  CHECK(config_error("[grid]\nn = 48\n[scenario]\nname = run\n") != "");
  CHECK(config_error("[scenario]\nname = run\nsnapshots = yes\n").find("line 3") != std::string::npos);
  CHECK(config_error("[scenario]\nname = run\nname = run\n").find("duplicate") != std::string::npos);
  CHECK(config_error("[scenario]\nname = relax\namplitudes = 3, 1\n") != "");
  CHECK(config_error("[scenario]\nname = mixbench\n") != "");
  CHECK(config_error("[scenario]\nname = approx\namplitudes = 1\n").find("scenario.window") != std::string::npos);
  CHECK(config_error("n = 64\n") != "");
  CHECK_THROWS_AS(parse_config("[scenario]\nname = nothing\n"), InvalidArgument);
}

TEST_CASE("config comments, lists and booleans") {
  const RunConfig c = parse_config(
      "# leading comment\n[grid]\n  n = 64   # trailing\n[initial]\nkind = sine\nmode = 2, -1\n"
      "[scenario]\nname = run\namplitudes = 0.5, 1e3\nsnapshots = false\n");
  CHECK(c.n == 64);
  CHECK(c.initial.kind == InitialKind::SINE);
  CHECK(c.initial.mode == Wavevector{2, -1, 0});
  CHECK(c.scenario.amplitudes == std::vector<double>{0.5, 1000.0});
  CHECK_FALSE(c.scenario.snapshots);
  CHECK(c.scenario.name == Scenario::RUN);
}

TEST_CASE("serialized configs reparse to equal configs") {
  for (const auto& entry : fs::directory_iterator(fs::path(KSMIX_SOURCE_DIR) / "configs")) {
    const RunConfig c = parse_config(read_file(entry.path()));
    INFO(entry.path().string());
    CHECK(parse_config(serialize_config(c)) == c);
  }
  RunConfig c = parse_config(kSmallRun);
  c.initial.center = {0.1 / 3, -std::numbers::pi / 17, 0.0};
  c.initial.decay = 2.0000000000000004;
  c.flow.kind = FlowChoice::SHEAR;
  c.flow.switch_time = 1.0 / 7;
  c.flow.phase_seed = 18446744073709551615ull;
  c.stepper.dt_max = 3e-5;
  c.stepper.chemotaxis = false;
  c.detector.h1_cap = 123456.789;
  c.scenario.horizon = 0.1 / 3;
  c.scenario.B = 7.25;
  c.scenario.eps_targets = {0.4, 1.0 / 3};
  c.scenario.resolutions = {32, 64};
  const RunConfig back = parse_config(serialize_config(c));
  CHECK(back == c);
  CHECK(serialize_config(back) == serialize_config(c));
  CHECK(config_reference().find("scenario.amplitudes") != std::string::npos);
}

TEST_CASE("records csv formatting") {
  CHECK(records_csv({}) == std::string(kCsvHeader) + "\n");
  DiagnosticsRecord r;
  r.t = 0.1;
  r.mass = 1.0 / 3;
  r.dt_used = 1e-300;
  const std::string csv = records_csv({r, r});
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvHeader);
  std::getline(in, line);
  CHECK(line.rfind("0.10000000000000001,0.33333333333333331,", 0) == 0);
  CHECK(std::stod(line.substr(line.rfind(',') + 1)) == 1e-300);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.back() == '\n');
  CHECK(format_real(1.0 / 3) == "0.33333333333333331");
  for (double x : {kPi, 1e-17, -2.5e300, 6.02214076e23}) CHECK(std::stod(format_real(x)) == x);
}

TEST_CASE("snapshot layout and bit-exact roundtrip") {
  const Grid g = make_grid(2, 16);
  const ScalarField f = random_smooth_field(g, 3, 3.0) + ScalarField::constant(g, 2.0);
  const std::string b = encode_snapshot(f, 0.125);
  REQUIRE(b.size() == 4 + 12 + 16 + 8 * g.size());
  CHECK(b.substr(0, 4) == "KSMX");
  auto u32 = [&](std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[pos + i]);
    return v;
  };
  auto f64 = [&](std::size_t pos) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[pos + i]);
    return std::bit_cast<double>(v);
  };
  CHECK(u32(4) == 1u);
  CHECK(u32(8) == 2u);
  CHECK(u32(12) == 16u);
  CHECK(f64(16) == 0.125);
  CHECK(f64(24) == f.mean());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(f64(32 + 8 * i) == f[i]);

  const fs::path dir = scratch("snap");
  fs::create_directories(dir);
  write_snapshot(dir / "a.ksmx", f, 0.125);
  const SnapshotData d = read_snapshot(dir / "a.ksmx");
  CHECK(d.field.values() == f.values());
  CHECK(d.field.grid() == g);
  CHECK(d.time == 0.125);
  CHECK(d.mean == f.mean());

  CHECK_THROWS(decode_snapshot(b.substr(0, 40)));
  std::string bad = b;
  bad[0] = 'X';
  CHECK_THROWS(decode_snapshot(bad));
  CHECK_THROWS_AS(read_snapshot(dir / "missing.ksmx"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("write_outputs manifest and overwrite") {
  const fs::path dir = scratch("out");
  write_outputs(dir, {{"b.csv", "2\n"}, {"a.csv", "1\n"}});
  CHECK(read_file(dir / "a.csv") == "1\n");
  const std::string m1 = read_file(dir / kManifestName);
  CHECK(m1 == sha256_hex("1\n") + "  a.csv\n" + sha256_hex("2\n") + "  b.csv\n");

  write_outputs(dir, {{"b.csv", "2\n"}, {"a.csv", "1\n"}});
  CHECK(read_file(dir / kManifestName) == m1);
  write_outputs(dir, {{"b.csv", "2\n"}, {"a.csv", "1.0\n"}});
  const std::string m2 = read_file(dir / kManifestName);
  CHECK(m2 != m1);
  CHECK(m2.substr(m2.find('\n')) == m1.substr(m1.find('\n')));
  CHECK(read_file(dir / "a.csv") == "1.0\n");

  const fs::path dir2 = scratch("out2");
  write_outputs(dir2, {}, {});
  CHECK(read_file(dir2 / "series.csv") == std::string(kCsvHeader) + "\n");

  put(dir / "blocker", "x");
  CHECK_THROWS_AS(write_outputs(dir / "blocker" / "sub", {{"a.csv", "1"}}), IoError);
  try {
    write_outputs(dir / "blocker" / "sub", {{"a.csv", "1"}});
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("blocker") != std::string::npos);
  }
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("verdict lines") {
  CHECK(verdict_line({"mass", true, "drift 1e-15"}) == "PASS mass: drift 1e-15");
  CHECK(verdict_line({"mass", false, "drift 1"}) == "FAIL mass: drift 1");
}

TEST_CASE("decay fit and monotonicity helpers") {
  std::vector<DiagnosticsRecord> recs;
  for (int i = 0; i <= 50; ++i) {
    DiagnosticsRecord r;
    r.t = 0.001 * i;
    r.l2_dev = 3.0 * std::exp(-17.5 * r.t);
    recs.push_back(r);
  }
  CHECK(fit_decay_rate(recs, 0.01, 0.05) == doctest::Approx(17.5).epsilon(1e-12));
  CHECK(std::isnan(fit_decay_rate(recs, 0.06, 0.07)));
  for (auto& r : recs) r.l2_dev = 0.0;
  CHECK(std::isnan(fit_decay_rate(recs, 0.0, 0.05)));

  CHECK(nonincreasing_with_tolerance({3, 3, 2, 1}, 0.05));
  CHECK(nonincreasing_with_tolerance({3, 3.1, 2, 1}, 0.05));
  CHECK_FALSE(nonincreasing_with_tolerance({3, 3.2, 2, 1}, 0.05));
  CHECK_FALSE(nonincreasing_with_tolerance({3, 3.1, 2, 2.05}, 0.05));
  CHECK(decreasing_with_tolerance({4, 3, 2}, 0.05));
  CHECK(decreasing_with_tolerance({4, 4, 2}, 0.0));
  CHECK_FALSE(decreasing_with_tolerance({4, 4, 4}, 0.0));
  CHECK(decreasing_with_tolerance({4, 4, 2}, 0.05));
  CHECK_FALSE(decreasing_with_tolerance({4, 4.1, 4.2}, 0.05));
}

TEST_CASE("amplitude list [0] on supercritical data has no completing amplitude") {
  RunConfig c = parse_config(
      "[grid]\nn = 128\n[initial]\nkind = gaussian\nmass = 60\nwidth = 0.03\n"
      "[flow]\nkind = shear\n[scenario]\nname = suppress\namplitudes = 0\nbaseline_horizon = 0.01\n");
  const SweepResult s = scenario_suppression_sweep(c);
  REQUIRE(s.rows.size() == 1u);
  CHECK(s.rows[0].termination != Termination::COMPLETED);
  CHECK_FALSE(s.a0_hat.has_value());
  CHECK(s.horizon == doctest::Approx(5 * s.baseline_time));
  CHECK(s.B == doctest::Approx(record(make_state(build_initial(c, config_grid(c))), 0).l2_dev));
}

TEST_CASE("relaxation fit of diffusion-dominated small data matches the linearized rate") {
  const RunConfig c = parse_config(
      "[grid]\nn = 64\n[initial]\nkind = sine\nbackground = 1\namplitude = 0.001\nmode = 1, 0\n"
      "[stepper]\ndt_max = 1e-4\n[scenario]\nname = relax\namplitudes = 0\nhorizon = 0.05\nrelax_delta = 0.005\n");
  const SweepResult s = scenario_relaxation_rate(c);
  REQUIRE(s.rows.size() == 1u);
  CHECK(s.rows[0].kappa == doctest::Approx(4 * kPi * kPi - 1).epsilon(0.05));
}

TEST_CASE("relaxation of constant data reports kappa as not applicable") {
  const RunConfig c = parse_config(
      "[grid]\nn = 32\n[initial]\nkind = constant\nbackground = 2\n[flow]\nkind = shear\n"
      "[scenario]\nname = relax\namplitudes = 10, 20\nhorizon = 0.002\n");
  const SweepResult s = scenario_relaxation_rate(c);
  for (const auto& r : s.rows) CHECK(std::isnan(r.kappa));
  const ScenarioReport rep = run_scenario(c);
  REQUIRE(find_file(rep, "summary.csv"));
  CHECK(find_file(rep, "summary.csv")->bytes.find(",NA,") != std::string::npos);
}

TEST_CASE("approximation distances vanish for constant data and ignore A without flow") {
  const RunConfig c = parse_config(
      "[grid]\nn = 32\n[initial]\nkind = constant\nbackground = 1\n[flow]\nkind = cellular\n"
      "[scenario]\nname = approx\namplitudes = 100, 200\nwindow = 0.5\nsamples = 4\n");
  for (const auto& r : scenario_approximation_check(c)) CHECK(r.sup_distance <= 1e-14);

  const RunConfig z = parse_config(
      "[grid]\nn = 32\n[initial]\nkind = gaussian\nmass = 5\nwidth = 0.1\n"
      "[scenario]\nname = approx\namplitudes = 100, 200, 400\nwindow = 0.5\nsamples = 4\n");
  const auto rows = scenario_approximation_check(z);
  REQUIRE(rows.size() == 3u);
  CHECK(rows[0].sup_distance > 0.0);
  CHECK(rows[1].sup_distance == rows[0].sup_distance);
  CHECK(rows[2].sup_distance == rows[0].sup_distance);
}

TEST_CASE("mixing bench of zero data has identically zero traces") {
  const RunConfig c = parse_config(
      "[grid]\nn = 32\n[initial]\nkind = constant\nbackground = 0\n[flow]\nkind = mixer\nlevels = 2\n"
      "per_level_time = 0.5\n[scenario]\nname = mixbench\n");
  const MixingBenchResult m = scenario_mixing_bench(c);
  REQUIRE(!m.trace.empty());
  for (const auto& row : m.trace) {
    CHECK(row[1] == 0.0);
    CHECK(row[2] == 0.0);
  }
  for (const auto& [t, h] : m.stage_hm1) CHECK(h == 0.0);
}

TEST_CASE("inequality suite family is admissible") {
  for (const auto& s : standard_inequalities()) CHECK_NOTHROW(check_admissible(s, 2));
  CHECK(standard_inequalities().size() >= 4u);
}

TEST_CASE("scenario outputs are deterministic and carry verdicts") {
  const RunConfig c = parse_config(kSmallRun);
  const ScenarioReport a = run_scenario(c);
  const ScenarioReport b = run_scenario(c);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].name == b.files[i].name);
    CHECK(a.files[i].bytes == b.files[i].bytes);
  }
  CHECK(find_file(a, "series.csv"));
  CHECK(find_file(a, "verdict.txt"));
  CHECK(find_file(a, "config.cfg"));
  CHECK(parse_config(find_file(a, "config.cfg")->bytes) == c);
  REQUIRE(find_verdict(a, "mass_conservation"));
  CHECK(find_verdict(a, "mass_conservation")->pass);
  CHECK(a.all_pass());

  RunConfig other = c;
  other.scenario.seed = 2;
  const ScenarioReport d = run_scenario(other);
  CHECK(find_file(d, "series.csv")->bytes != find_file(a, "series.csv")->bytes);

  const fs::path d1 = scratch("det1"), d2 = scratch("det2");
  write_outputs(d1, a.files);
  write_outputs(d2, b.files);
  CHECK(read_file(d1 / kManifestName) == read_file(d2 / kManifestName));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  put(dir / "run.cfg", kSmallRun);
  const std::string out = " --out " + (dir / "res").string();

  CHECK(run_cli("run --config " + (dir / "run.cfg").string() + out) == 0);
  CHECK(fs::exists(dir / "res" / "series.csv"));
  CHECK(fs::exists(dir / "res" / kManifestName));
  CHECK(run_cli("run --config " + (dir / "run.cfg").string() + out + " --seed 9 --resolution 64") == 0);
  CHECK(run_cli("blowup --config " + (dir / "run.cfg").string() + out) == 2);
  CHECK(run_cli("run --config " + (dir / "missing.cfg").string() + out) == 2);
  CHECK(run_cli("run --config " + (dir / "run.cfg").string() + out + " --resolution 48") == 2);
  CHECK(run_cli("run") == 2);
  CHECK(run_cli("--help") == 0);

  put(dir / "bad.cfg", "[scenario]\nname = suppress\namplitide = 1\n");
  CHECK(run_cli("suppress --config " + (dir / "bad.cfg").string() + out) == 2);

  put(dir / "short_mix.cfg",
      "[grid]\nn = 32\n[initial]\nkind = sine\n[flow]\nkind = mixer\nlevels = 2\nper_level_time = 0.01\n"
      "[scenario]\nname = mixbench\n");
  CHECK(run_cli("mixbench --config " + (dir / "short_mix.cfg").string() + out) == 1);

  const std::string hot =
      "[grid]\nn = 64\n[initial]\nkind = gaussian\nmass = 60\nwidth = 0.05\n[scenario]\nname = run\nhorizon = 0.01\n";
  put(dir / "hot.cfg", hot);
  const RunConfig hc = parse_config(hot);
  const Grid hg = config_grid(hc);
  const RunResult hr = run_simulation(build_initial(hc, hg), build_flow(hc, hg), 0.01, hc.stepper);
  const ScenarioReport hrep = run_scenario(hc);
  CHECK(hrep.numerical_abort == (hr.termination == Termination::OVERFLOW));
  const int expect = hrep.numerical_abort ? 3 : (hrep.all_pass() ? 0 : 1);
  MESSAGE("supercritical run terminates as " << to_string(hr.termination));
  CHECK(run_cli("run --config " + (dir / "hot.cfg").string() + out) == expect);
  fs::remove_all(dir);
}
