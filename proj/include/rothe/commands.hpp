#pragma once

// The four command-line actions. Each writes its tables under the output
// directory, appends one summary.csv row per run or check, and returns the
// process exit status.

#include <cstdint>
#include <optional>
#include <string>

#include "rothe/config.hpp"

namespace rothe::cli {

struct CommandOptions {
  /// --out; falls back to $ROTHE_HVI_OUT, then to [output] dir
  std::optional<std::string> out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool quiet = false;
};

std::string resolve_output_dir(const ExperimentConfig& cfg, const CommandOptions& opts);

int cmd_run(const ExperimentConfig& cfg, const CommandOptions& opts);
int cmd_study(const ExperimentConfig& cfg, const CommandOptions& opts);
int cmd_compare(const ExperimentConfig& cfg, const CommandOptions& opts);
int cmd_check(const ExperimentConfig& cfg, const CommandOptions& opts);

}  // namespace rothe::cli
