#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tpstokes/config.hpp"

namespace tpstokes {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitGeometry = 3,
  kExitRegularity = 4,
  kExitVerification = 5,
};

struct ExperimentOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::vector<std::filesystem::path> files;
};

/// Dispatches on cfg.mode and writes results into `out_dir` (created if
/// needed). Progress and the outcome are logged to `log`.
ExperimentOutcome run_experiment(const Config& cfg, const std::filesystem::path& out_dir,
                                 std::ostream& log);

}  // namespace tpstokes
