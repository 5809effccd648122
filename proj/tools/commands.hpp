#pragma once

namespace cbi::cli {

/// Full command-line entry point: parses argv, dispatches the subcommand,
/// returns the process exit code (0 ok, 1 validation error, 2 numerical
/// error). Diagnostics go to stderr, summaries to stdout.
int run_command(int argc, const char* const* argv);

}  // namespace cbi::cli
