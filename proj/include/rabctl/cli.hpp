#pragma once

#include <iosfwd>

namespace rabctl {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2 };

/**
 * @brief Runs one CLI invocation: equilibria, simulate, gain-check, sweep or reproduce.
 *
 * Data goes to @p out, diagnostics to @p err.
 */
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rabctl
