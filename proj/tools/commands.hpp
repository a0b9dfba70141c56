#pragma once

#include "config.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace railyard::cli {

struct RunOptions {
  std::filesystem::path out_dir;
  int threads = 1;
};

// Exit codes.
constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;

// Runs one subcommand. Library and config errors propagate; main maps them
// to exit codes.
int run_command(const std::string& command, const ExperimentConfig& config, const RunOptions& opts, std::ostream& log);

} // namespace railyard::cli
