#pragma once

#include <string>
#include <vector>

namespace handpose {

/// Entry point behind the command-line binary. Returns the process exit code:
/// 0 success, 1 usage error, 2 data/format error, 3 training failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace handpose
