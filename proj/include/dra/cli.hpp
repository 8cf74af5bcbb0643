#pragma once

#include <string>
#include <vector>

namespace dra {

// The dra-sim command line: load or generate a scenario, integrate it, write
// metrics (and optionally a trajectory), and optionally cross-check each
// segment against the centralized oracle. Returns the process exit code:
// 0 success, 1 runtime/validation/oracle failure, 2 usage error.
int run_cli(const std::vector<std::string>& args);

}  // namespace dra
