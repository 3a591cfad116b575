#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "se3ekf/config.hpp"
#include "se3ekf/errors.hpp"
#include "se3ekf/harness.hpp"
#include "se3ekf/jacobian_check.hpp"
#include "se3ekf/scenario.hpp"
#include "se3ekf/telemetry.hpp"

namespace {

using namespace se3ekf;

constexpr int kConfigExit = 3;

ScenarioConfig resolve_config(const std::string& scenario, const std::string& config_path) {
  if (config_path.empty()) {
    return scenario_by_name(scenario.empty() ? "example1" : scenario);
  }
  if (scenario.empty()) return load_config(config_path);
  const ScenarioConfig base = scenario_by_name(scenario);
  ScenarioConfig c = load_config(config_path, &base);
  if (c.name != scenario) {
    throw ConfigError("config file selects scenario '" + c.name + "' but --scenario is '" +
                      scenario + "'");
  }
  return c;
}

int cmd_run(const std::string& scenario, const std::string& config_path, const std::string& out,
            std::optional<std::uint64_t> seed, std::optional<double> dt,
            std::optional<double> duration) {
  ScenarioConfig c = resolve_config(scenario, config_path);
  if (seed) c.seed = *seed;
  if (dt) c.dt = *dt;
  if (duration) c.duration = *duration;
  c.validate();

  const RunResult r = run(c);
  if (!out.empty()) {
    write_csv(r.records, out);
  }
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "scenario = " << c.name << '\n' << "seed = " << c.seed << '\n';
  write_metrics(r.metrics, std::cout);
  for (const ThresholdCheck& ch : r.checks) {
    std::cout << "check " << ch.name << ": " << format_double(ch.value) << " vs "
              << format_double(ch.limit) << (ch.passed ? " ok" : " FAILED") << '\n';
  }
  if (r.status == RunStatus::DegenerateAbort) {
    std::cerr << "aborted: " << r.diagnostic << '\n';
  }
  return exit_code(r.status);
}

int cmd_verify(const std::string& scenario, const std::string& config_path,
               const std::string& report, int states, std::uint64_t seed) {
  const ScenarioConfig c = resolve_config(scenario, config_path);
  c.validate();
  SweepOptions opt;
  opt.states = states;
  opt.seed = seed;
  const SweepResult r = jacobian_sweep(c, opt);

  if (report.empty()) {
    write_deviation_report(r, std::cout);
  } else {
    std::ofstream f(report);
    if (!f) throw ConfigError("cannot open '" + report + "' for writing");
    write_deviation_report(r, f);
    if (!f) throw ConfigError("write failed for '" + report + "'");
  }
  std::cerr << "states checked: " << r.states_checked << ", skipped: " << r.states_skipped
            << ", worst full-matrix relative error: " << format_double(r.max_full_rel) << '\n';
  std::cerr << "worst relative error per block:\n";
  for (int i = 0; i < 6; ++i) {
    std::cerr << "  ";
    for (int j = 0; j < 6; ++j) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%10.2e", r.max_rel[i][j]);
      std::cerr << buf;
    }
    std::cerr << '\n';
  }
  std::cerr << (r.passed() ? "jacobian check passed" : "jacobian check FAILED") << '\n';
  return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrotor geometric control with an error-state EKF on SO(3)"};
  app.require_subcommand(1);

  std::string scenario, config_path, out, report;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt, duration;
  int states = 120;
  std::uint64_t sweep_seed = 7;

  CLI::App* run_cmd = app.add_subcommand("run", "simulate a scenario and write telemetry");
  run_cmd->add_option("--scenario", scenario, "bundled scenario name");
  run_cmd->add_option("--config", config_path, "key = value configuration file");
  run_cmd->add_option("--out", out, "telemetry CSV path");
  run_cmd->add_option("--seed", seed, "random seed");
  run_cmd->add_option("--dt", dt, "step size in seconds");
  run_cmd->add_option("--duration", duration, "horizon in seconds");

  CLI::App* verify_cmd =
      app.add_subcommand("verify-jacobian", "compare the assembled Jacobian with finite differences");
  verify_cmd->add_option("--scenario", scenario, "bundled scenario name");
  verify_cmd->add_option("--config", config_path, "key = value configuration file");
  verify_cmd->add_option("--report", report, "deviation report CSV path (default stdout)");
  verify_cmd->add_option("--states", states, "number of sampled states")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", sweep_seed, "seed for the state perturbations");

  CLI::App* list_cmd = app.add_subcommand("list-scenarios", "print the bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (list_cmd->parsed()) {
      for (const ScenarioInfo& s : scenario_registry()) {
        std::cout << s.name << "\t" << s.summary << '\n';
      }
      return 0;
    }
    if (run_cmd->parsed()) return cmd_run(scenario, config_path, out, seed, dt, duration);
    if (verify_cmd->parsed()) return cmd_verify(scenario, config_path, report, states, sweep_seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigExit;
  }
  return kConfigExit;
}
