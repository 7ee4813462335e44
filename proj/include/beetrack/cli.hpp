#pragma once

#include <iosfwd>

namespace beetrack {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitInternal = 3,
};

/// Entry point of the `beetrack` tool; also callable in-process.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace beetrack
