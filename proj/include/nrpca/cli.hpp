#pragma once

#include <iosfwd>

namespace nrpca::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCertificateFailed = 2;

/// Runs one invocation (argv[0] is the program name). Reports go to `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nrpca::cli
