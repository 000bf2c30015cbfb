#pragma once

#include <string>
#include <vector>

namespace ips {

/// Runs one CLI invocation. Exit codes: 0 success, 1 a requested check
/// failed (e.g. --expect-pass on a rejecting test), 2 input or usage error.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace ips
