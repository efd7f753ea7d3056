#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace polarlab::cli {

enum ExitCode : int {
    kOk = 0,
    kThresholdFailure = 1,
    kUsageError = 2,
    kNumericError = 3,
};

/// Runs one command line (args excludes the program name). Output files go
/// to --out, or to `out` when --out is absent; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polarlab::cli
