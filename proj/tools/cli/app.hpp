#pragma once

#include <string>
#include <vector>

namespace reebflow::cli {

/// Exit codes: 0 all checks passed, 1 a check failed, 2 usage or
/// configuration error, 3 numerical failure.
enum ExitCode : int { kPass = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

int run(int argc, const char* const* argv);
/// args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace reebflow::cli
