#pragma once

#include <string>
#include <vector>

namespace forestlab {

// Full command-line entry point: parses, dispatches, writes artifacts.
// Returns the process exit code (0 ok, 2 invalid input, 3 budget exhausted,
// 4 certified-negative verdict).
int run_cli(const std::vector<std::string>& args);

}  // namespace forestlab
