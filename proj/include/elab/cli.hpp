#pragma once

#include <string>
#include <vector>

namespace elab::cli {

/// Runs the command line given args (excluding the program name).
/// Exit codes: 0 success, 1 input error, 2 solver-degenerate outcome.
int run(const std::vector<std::string>& args);

}  // namespace elab::cli
