#pragma once

#include <string>
#include <vector>

namespace radiomap::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kRuntime = 2 };

/// Entry point of the `radiomap` tool: reconstruct, evaluate, sweep, genscene.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

} // namespace radiomap::cli
