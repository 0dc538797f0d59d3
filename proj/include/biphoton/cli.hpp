#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace biphoton::cli {

enum ExitCode : int {
    ok = 0,
    usage_error = 1,
    numerical_error = 2,
    null_kernel = 3,
};

inline constexpr const char* version = "0.1.0";

/// Runs one subcommand (eval, decompose, entropy, sweep, check). `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace biphoton::cli
