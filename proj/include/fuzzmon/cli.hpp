#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fuzzmon::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kAcceptanceFailure = 3 };

// Runs one subcommand. args excludes the program name. Logs and diagnostics
// go to log; reports go to the files named by --out (stdout when omitted).
int run(const std::vector<std::string>& args, std::ostream& log);
int run(const std::vector<std::string>& args);

}  // namespace fuzzmon::cli
