#pragma once

#include <ostream>

namespace tscal::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kParse = 2,
    kMath = 3,
    kVerification = 4,
};

/// Runs one command-line invocation. Results go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace tscal::cli
