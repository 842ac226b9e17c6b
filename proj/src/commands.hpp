#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace walklab::cli {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitInvariant = 4;

const std::vector<std::string>& command_names();

// Runs one command and returns its artifact text. Throws walklab::Error.
std::string run_command(const ExperimentConfig& cfg);

// Runs, writes the artifact (file or stdout) and maps errors to exit statuses.
int run(const ExperimentConfig& cfg);

int exit_status(ErrorKind k);

// 17 significant digits, with negative zero printed as 0.
std::string fmt(double x);

}  // namespace walklab::cli
