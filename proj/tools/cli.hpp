#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entbound::cli {

/// Exit codes: 0 success or pass, 1 validation or physics failure, 2 input or usage error.
enum ExitCode { kSuccess = 0, kFailure = 1, kUsage = 2 };

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace entbound::cli
