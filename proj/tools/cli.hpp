#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phasehpss::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kBadArgs = 1;
inline constexpr int kIoFailure = 2;
inline constexpr int kDiverged = 3;

// Runs the command line in `args` (without the program name). Normal output
// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

} // namespace phasehpss::cli
