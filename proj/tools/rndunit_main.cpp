// rndunit: scenario-driven runner for random unitary channels and their
// master equations.
//
//   rndunit run <scenario.json>       run and write CSV + report
//   rndunit validate <scenario.json>  parse and check invariants only
//   rndunit demo <name>               run a built-in scenario
//
// Exit codes: 0 success, 1 I/O or usage error, 2 validation error,
// 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rndunit/error.hpp"
#include "rndunit/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::optional<std::string> output;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  rndunit::ScenarioOverrides overrides() const { return {output, dt, t_final, seed}; }
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--output", flags.output, "CSV output path (overrides the scenario)");
  cmd->add_option("--dt", flags.dt, "Time step");
  cmd->add_option("--t-final", flags.t_final, "Final time");
  cmd->add_option("--seed", flags.seed, "Seed for Monte-Carlo ensembles");
  cmd->add_flag("--quiet", flags.quiet, "Only report errors");
}

void print_summary(const rndunit::Scenario& s, const rndunit::RunRecord& record,
                   const std::string& csv_path) {
  std::cout << "scenario " << s.name << ": " << record.series.front().series.size()
            << " samples, " << s.ensemble.size() << " realizations, d = " << s.dim << "\n";
  for (const auto& line : record.log) std::cout << "  " << line << "\n";
  std::cout << "  exact: ensemble average vs embedding max trace distance "
            << record.embedding_max_distance << " over " << record.embedding_checkpoints
            << " checkpoints\n";
  for (const auto& sr : record.series) {
    if (!sr.report) continue;
    std::cout << "  " << sr.name << ": max trace distance " << sr.report->max_error;
    if (sr.report->breakdown_time) {
      std::cout << ", exceeds " << s.breakdown_threshold << " at t = " << *sr.report->breakdown_time;
    }
    std::cout << "\n";
  }
  std::cout << "  wrote " << csv_path << " (" << record.wall_time_seconds << " s)\n";
}

int run_scenario(const rndunit::Scenario& s, bool quiet) {
  const rndunit::RunRecord record = rndunit::run(s);
  for (const auto& w : record.warnings) std::cerr << "warning: " << w << "\n";
  rndunit::write_csv(record, s.output_path);
  rndunit::write_report(record, rndunit::report_path_for(s.output_path));
  if (!quiet) print_summary(s, record, s.output_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random unitary channels: exact dynamics and master equations"};
  app.set_version_flag("--version", std::string(rndunit::kToolVersion));
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string run_path;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file");
  run_cmd->add_option("scenario", run_path, "Scenario JSON")->required();
  add_common_flags(run_cmd, run_flags);

  std::string validate_path;
  CommonFlags validate_flags;
  auto* validate_cmd = app.add_subcommand("validate", "Parse a scenario and check its invariants");
  validate_cmd->add_option("scenario", validate_path, "Scenario JSON")->required();
  add_common_flags(validate_cmd, validate_flags);

  std::string demo_name;
  CommonFlags demo_flags;
  bool emit_scenario = false;
  auto* demo_cmd = app.add_subcommand("demo", "Run a built-in scenario");
  demo_cmd->add_option("name", demo_name, "gaussian-dephasing, two-point-breakdown or gksl-qubit")
      ->required();
  demo_cmd->add_flag("--emit-scenario", emit_scenario,
                     "Print the scenario JSON to stdout instead of running it");
  add_common_flags(demo_cmd, demo_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every other usage error exits 1.
    return app.exit(e) == 0 ? kExitOk : kExitIo;
  }

  try {
    if (*run_cmd) {
      return run_scenario(rndunit::load_scenario(run_path, run_flags.overrides()), run_flags.quiet);
    }
    if (*validate_cmd) {
      const auto s = rndunit::load_scenario(validate_path, validate_flags.overrides());
      if (!validate_flags.quiet) {
        std::cout << validate_path << ": ok (" << s.name << ", d = " << s.dim << ", "
                  << s.ensemble.size() << " realizations)\n";
        for (const auto& line : s.log) std::cout << "  " << line << "\n";
      }
      return kExitOk;
    }
    if (*demo_cmd) {
      auto document = rndunit::demo_scenario(demo_name);
      if (emit_scenario) {
        std::cout << document.dump(2) << "\n";
        return kExitOk;
      }
      return run_scenario(rndunit::parse_scenario(std::move(document), demo_flags.overrides()),
                          demo_flags.quiet);
    }
  } catch (const rndunit::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const rndunit::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
