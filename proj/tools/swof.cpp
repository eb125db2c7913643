#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "swof/config.hpp"
#include "swof/errors.hpp"
#include "swof/io.hpp"
#include "swof/simulation.hpp"
#include "swof/verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

int run(const std::string& config_path, const std::vector<std::string>& overrides, const std::string& output_dir,
        bool quiet) {
  const swof::SimulationConfig config = swof::parse_config(config_path, overrides);
  swof::RunOptions options;
  options.quiet = quiet;
  options.output_dir = output_dir;
  if (!quiet) {
    std::cerr << swof::provenance(config) << "\n";
  }
  const swof::RunSummary s = swof::run_simulation(config, options);
  std::cout << "# " << swof::provenance(config) << "\n"
            << "steps " << s.steps << "\n"
            << "retries " << s.retries << "\n"
            << "final_time " << swof::format_double(s.final_time) << "\n"
            << "wall_seconds " << s.wall_seconds << "\n"
            << "min_h " << swof::format_double(s.min_h) << "\n"
            << "max_h " << swof::format_double(s.max_h) << "\n"
            << "residual " << swof::format_double(s.residual) << "\n";
  for (const auto& path : s.outputs) {
    std::cout << "output " << path << "\n";
  }
  return kExitOk;
}

int check_config(const std::string& config_path, const std::vector<std::string>& overrides) {
  const swof::SimulationConfig config = swof::parse_config(config_path, overrides);
  const swof::SimulationInputs inputs = swof::load_inputs(config);
  std::cout << "# " << swof::provenance(config) << "\n"
            << config.canonical << "# grid " << inputs.grid.nx << " x " << inputs.grid.ny << ", cell "
            << swof::format_double(inputs.grid.dx) << " m\n"
            << "ok\n";
  return kExitOk;
}

int verify(const std::string& suite) {
  swof::verify::Report report;
  if (suite == "lake") {
    report = swof::verify::lake_suite();
  } else if (suite == "ritter") {
    report = swof::verify::ritter_suite();
  } else {
    report = swof::verify::convergence_suite();
  }
  std::cout << "# swof " << SWOF_VERSION << ", verify " << suite << "\n";
  swof::verify::print(std::cout, report);
  return report.pass() ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shallow water overland flow solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  bool quiet = false;

  auto* run_cmd = app.add_subcommand("run", "Run a simulation");
  run_cmd->add_option("--config", config_path, "Configuration file")->required();
  run_cmd->add_option("--set", overrides, "Override a key (key=value), repeatable");
  run_cmd->add_option("--output-dir", output_dir, "Directory for snapshots and reports");
  run_cmd->add_flag("--quiet", quiet, "Suppress progress output");

  auto* check_cmd = app.add_subcommand("check-config", "Validate a configuration and its input files");
  check_cmd->add_option("--config", config_path, "Configuration file")->required();
  check_cmd->add_option("--set", overrides, "Override a key (key=value), repeatable");

  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "Run an analytic verification suite");
  verify_cmd->add_option("suite", suite, "lake, ritter or convergence")
      ->required()
      ->check(CLI::IsMember({"lake", "ritter", "convergence"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*run_cmd) return run(config_path, overrides, output_dir, quiet);
    if (*check_cmd) return check_config(config_path, overrides);
    return verify(suite);
  } catch (const swof::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const swof::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitInput;
  } catch (const swof::FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
