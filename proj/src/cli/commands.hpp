// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cli/config.hpp"

namespace activestab::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

int cmd_global(const RunConfig& c);
int cmd_stability(const RunConfig& c);
int cmd_surrogate(const RunConfig& c);
int cmd_calibrate(const RunConfig& c);
int cmd_gradfield(const RunConfig& c);
int cmd_eigenstudy(const RunConfig& c);

/// Dispatches on c.command after applying the worker count.
int execute(const RunConfig& c);

/// Full command line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace activestab::cli
