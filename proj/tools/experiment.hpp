#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace lab {

inline const std::vector<std::string> kSubcommands{"sample", "flow", "invariance", "rate",
                                                   "oracle", "zladder", "appendix"};

enum ExitCode { kPass = 0, kExperimentFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

/// Runs one subcommand and writes its artifacts under [run] out. Returns kPass
/// or kExperimentFailure; config problems throw ConfigError, module failures
/// throw gibbs::Error (after status.json has been flagged).
int run(const std::string& subcommand, const Config& cfg);

}  // namespace lab
