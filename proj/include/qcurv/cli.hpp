#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcurv {

/// Exit codes of the command line tool.
enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitInvalid = 2 };

/// Runs the `qcurv` command line (subcommands verify, point, falsify, equality).
/// `args` excludes the program name. CSV goes to `out` unless redirected with
/// --out; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcurv
