#pragma once

#include <ostream>

namespace superres::cli {

/// Exit codes of the superres tool.
enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

/// Runs the command line in-process. Data goes to `out` unless an output
/// path is given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace superres::cli
