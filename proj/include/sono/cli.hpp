#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sono::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Runs one CLI invocation. Diagnostics go to err, results to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sono::cli
