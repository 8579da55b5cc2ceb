// SPDX-License-Identifier: Apache-2.0
//
// Command-line front door. Exit codes: 0 success/converged, 1 usage or
// config error (also replay mismatch), 2 optimizer hit max_iters,
// 3 step failure, 4 singular Fisher.

#pragma once

#include <string>
#include <vector>

namespace crbmo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMaxIters = 2;
inline constexpr int kExitStepFailure = 3;
inline constexpr int kExitSingular = 4;

/// Runs the CLI with argv[1:]-style arguments. Testable in-process.
int run_cli(const std::vector<std::string>& args);

}  // namespace crbmo
