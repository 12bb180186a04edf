#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dispersal {

// Runs one subcommand (eigen | solve | threshold | diagram | check) against
// the streams and returns the process exit code: 0 success, 1 bad input or
// failed computation, 2 audit failure, 3 no solution certified, 4 threshold
// search degenerate.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace dispersal
