#pragma once

#include <string>

#include "qkr/cli/config.hpp"

namespace qkr::cli {

// Command bodies; they throw std::invalid_argument for configuration
// problems and qkr::NumericalFailure for propagation failures.
void cmd_simulate(const RunConfig& cfg);
void cmd_oracle(const RunConfig& cfg);
void cmd_scan(const RunConfig& cfg);
void cmd_map(const RunConfig& cfg);
void cmd_fit(const RunConfig& cfg);
void cmd_reduce(const RunConfig& cfg);

// Runs the named command and maps exceptions onto exit codes:
// 0 ok, 2 configuration error, 3 numerical failure.
int dispatch(const std::string& command, const RunConfig& cfg);

}  // namespace qkr::cli
