#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ksmix/config.hpp"
#include "ksmix/output.hpp"
#include "ksmix/scenarios.hpp"

namespace {

enum ExitCode { kPass = 0, kAssertionFailure = 1, kConfigError = 2, kNumericalAbort = 3 };

struct Overrides {
  std::string config;
  std::string out;
  int resolution = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

std::string describe(ksmix::Scenario s) {
  switch (s) {
    case ksmix::Scenario::RUN: return "single simulation with mass and criterion checks";
    case ksmix::Scenario::BLOWUP_BASELINE: return "fixed-flow run with blow-up detection and second-moment trace";
    case ksmix::Scenario::SUPPRESSION_SWEEP: return "amplitude sweep against the zero-flow blow-up baseline";
    case ksmix::Scenario::RELAXATION_RATE: return "fitted L2 decay rate per amplitude";
    case ksmix::Scenario::APPROXIMATION_CHECK: return "distance between full and pure-transport runs per amplitude";
    case ksmix::Scenario::MIXING_BENCH: return "pure transport under the multiscale mixer";
    case ksmix::Scenario::INEQ_SUITE: return "functional inequality ratios over random ensembles";
  }
  return "";
}

int execute(ksmix::Scenario scenario, const Overrides& o) {
  ksmix::RunConfig cfg;
  try {
    cfg = ksmix::parse_config(ksmix::read_file(o.config));
    if (cfg.scenario.name != scenario) {
      throw ksmix::ConfigError("config declares scenario '" + ksmix::scenario_name(cfg.scenario.name) +
                               "' but subcommand is '" + ksmix::scenario_name(scenario) + "'");
    }
    if (o.resolution != 0) cfg.n = o.resolution;
    if (o.seed_set) cfg.scenario.seed = o.seed;
    if (!o.out.empty()) cfg.scenario.output = o.out;
    ksmix::validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  }

  ksmix::ScenarioReport rep;
  try {
    rep = ksmix::run_scenario(cfg);
  } catch (const ksmix::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ksmix::InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kNumericalAbort;
  }

  try {
    ksmix::write_outputs(cfg.scenario.output, rep.files);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kConfigError;
  }

  for (const auto& v : rep.verdicts) std::cout << ksmix::verdict_line(v) << "\n";
  if (rep.numerical_abort) {
    std::cerr << "numerical abort: run ended in OVERFLOW\n";
    return kNumericalAbort;
  }
  return rep.all_pass() ? kPass : kAssertionFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keller-Segel with mixing flows: simulations and scenario checks"};
  app.footer("Configuration keys and defaults:\n\n" + ksmix::config_reference() +
             "\nExit codes: 0 all assertions pass, 1 assertion failure, 2 configuration or I/O error, "
             "3 numerical abort.");
  app.require_subcommand(1);

  Overrides o;
  const ksmix::Scenario all[] = {ksmix::Scenario::RUN,
                                 ksmix::Scenario::BLOWUP_BASELINE,
                                 ksmix::Scenario::SUPPRESSION_SWEEP,
                                 ksmix::Scenario::RELAXATION_RATE,
                                 ksmix::Scenario::APPROXIMATION_CHECK,
                                 ksmix::Scenario::MIXING_BENCH,
                                 ksmix::Scenario::INEQ_SUITE};
  for (ksmix::Scenario s : all) {
    auto* sub = app.add_subcommand(ksmix::scenario_name(s), describe(s));
    sub->add_option("--config", o.config, "configuration file")->required();
    sub->add_option("--out", o.out, "output directory (overrides scenario.output)");
    sub->add_option("--resolution", o.resolution, "grid points per side (overrides grid.n)");
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&o](std::uint64_t s) {
          o.seed = s;
          o.seed_set = true;
        },
        "random seed (overrides scenario.seed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  for (ksmix::Scenario s : all) {
    if (app.got_subcommand(ksmix::scenario_name(s))) return execute(s, o);
  }
  return kConfigError;
}
