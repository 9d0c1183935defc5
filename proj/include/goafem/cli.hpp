#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace goafem::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_solver_failure = 3;

/// `run` subcommand. args excludes the program and subcommand names.
int cmd_run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// `study` subcommand. args excludes the program and subcommand names.
int cmd_study(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Dispatches `goafem run ...` and `goafem study ...`.
int main(int argc, char **argv, std::ostream &out, std::ostream &err);

} // namespace goafem::cli
