#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flockcert::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInfeasible = 3, kNumericalAbort = 4 };

/// Runs one command line (without the program name), e.g.
/// {"check", "--dist", "dirac:tau=0", "--lambda", "1", "--v0", "1"}.
/// Reports go to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flockcert::cli
