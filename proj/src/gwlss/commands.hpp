#pragma once

// The five batch commands. Each takes a parsed experiment, writes its files
// under the output directory and returns the main JSON report.

#include <cstdint>
#include <optional>
#include <string>

#include "gwlss/config.hpp"
#include "gwlss/error.hpp"

namespace gwlss {

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<long> replicas;
  std::optional<std::string> out_dir;
  bool quick = false;
  bool progress = false;  // progress lines on stderr
};

enum ExitCode : int {
  kExitPass = 0,
  kExitVerifyFailed = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
};

struct CommandOutput {
  int status = kExitPass;
  std::string report;  // JSON
};

/// Quick mode first, then explicit flags, which win over the file.
ExperimentConfig apply_overrides(ExperimentConfig cfg, const CommandOptions& opt);

CommandOutput cmd_predict(const ExperimentConfig& cfg);
CommandOutput cmd_simulate(const ExperimentConfig& cfg, bool progress = false);
CommandOutput cmd_verify(const ExperimentConfig& cfg, bool progress = false);
CommandOutput cmd_maxpoly(const ExperimentConfig& cfg, bool progress = false);
CommandOutput cmd_profile(const ExperimentConfig& cfg);

/// Dispatch by name ("predict", "simulate", ...).
CommandOutput run_command(const std::string& name, const ExperimentConfig& cfg, bool progress);

int exit_code_for(ErrorKind kind);

}  // namespace gwlss
