#pragma once

#include <iosfwd>

namespace esaloha::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 2,
  kSolverFailure = 3,
  kIoFailure = 4,
};

/// Runs the command line. Tables go to --out (stdout by default),
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& err);

}  // namespace esaloha::cli
