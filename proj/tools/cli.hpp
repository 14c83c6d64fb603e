#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rcr::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

// Entry point of the `rcr` tool. CSV goes to --out when given, otherwise to
// `out`; diagnostics go to `err`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

// Convenience overload; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rcr::cli
