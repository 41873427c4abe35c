#pragma once

#include <string>
#include <vector>

namespace ensctl {

/// Subcommands: forward, adjoint, cost, grad, grad-check, optimize,
/// multistart, oracle-compare, certify. Exit code 0 on success, 1 on
/// configuration or I/O errors, 2 on numerical failures (error.json is then
/// written to the output directory).
int run_command(const std::vector<std::string>& args);
int run_command(int argc, const char* const* argv);

}  // namespace ensctl
