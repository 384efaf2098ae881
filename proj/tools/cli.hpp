// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kgate::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 2,
    kWorkflowFailure = 3,
};

/// Entry point for the `kgate` binary. `args` excludes the program name.
/// Human-readable output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kgate::cli
