#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fgmatch::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kDataError = 2,
};

/// Entry point for the `fgmatch` tool. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads HARMONIZE_LOG (trace, debug, info, warn, error, critical, off) and
/// routes library logging to stderr.
void configure_logging();

}  // namespace fgmatch::cli
