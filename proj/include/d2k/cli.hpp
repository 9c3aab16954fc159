#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace d2k {

// Runs the command line tool against the given argument list (no program
// name). Returns the process exit code: 0 ok, 2 usage error, 1 runtime
// failure. All regular output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace d2k
