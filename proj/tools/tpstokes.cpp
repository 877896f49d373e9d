// Command line entry point:
//   tpstokes simulate|spectrum|thermal|verify --config <path> [--out <dir>] [--suite <name>]

#include <algorithm>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tpstokes/config.hpp"
#include "tpstokes/experiment.hpp"
#include "tpstokes/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-phase Stokes interface relaxation and stability tool"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite;
  for (const char* name : {"simulate", "spectrum", "thermal", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    if (std::string(name) == "verify")
      sub->add_option("--suite", suite, "suite name (overrides verify.suite)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tpstokes::kExitConfig;
  }
  const std::string mode = app.get_subcommands().front()->get_name();

  tpstokes::Config cfg;
  try {
    cfg = tpstokes::load_config(config_path);
  } catch (const tpstokes::ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << config_path << ": " << msg << "\n";
    return tpstokes::kExitConfig;
  }
  if (tpstokes::to_string(cfg.mode) != mode) {
    std::cerr << config_path << ": run.mode is " << tpstokes::to_string(cfg.mode)
              << " but the command is " << mode << "\n";
    return tpstokes::kExitConfig;
  }
  if (!suite.empty()) {
    const auto& names = tpstokes::suite_names();
    if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end()) {
      std::cerr << "unknown suite '" << suite << "'\n";
      return tpstokes::kExitConfig;
    }
    cfg.suite = suite;
  }
  if (!out_dir.empty()) cfg.output.directory = out_dir;

  try {
    const auto outcome = tpstokes::run_experiment(cfg, cfg.output.directory, std::cout);
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tpstokes::kExitIo;
  }
}
