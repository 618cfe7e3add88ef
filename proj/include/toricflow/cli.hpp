#pragma once

#include <iosfwd>

namespace toricflow::cli {

/// Runs one command line. Exit codes: 0 success, 1 the numerics failed or the
/// verdict is negative (artifacts still written), 2 malformed input.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace toricflow::cli
