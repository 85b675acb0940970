#pragma once

#include <iosfwd>

namespace fkwc::cli {

// Process exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_input_error = 1;
inline constexpr int exit_rejected = 2;
inline constexpr int exit_parameter_error = 3;
inline constexpr int exit_numerical_error = 4;

/// Runs the `fkwc` command line with the given arguments (argv[0] is the
/// program name). Results go to `out` unless --output names a file;
/// diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fkwc::cli
