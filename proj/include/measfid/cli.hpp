#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace measfid {

// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk         = 0,
    kExitUsage      = 2, // bad arguments or failed validation
    kExitNumeric    = 3, // numerical or model failure, failed cross-check
    kExitIo         = 4,
};

/// Runs the tool on `args` (program name excluded). CSV goes to --out or to
/// `out`; diagnostics and summaries go to `err`.
///
/// `--config FILE` preloads flags from `key = value` lines (flat namespace,
/// `#` comments). Keys are long flag names without dashes; flags given on the
/// command line win, and keys the chosen subcommand does not know are ignored.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace measfid
