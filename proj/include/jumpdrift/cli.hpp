#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jumpdrift::cli {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;
constexpr int kExitUsage = 64;

/// Runs one subcommand. `args` excludes the program name. CSV goes to the
/// --out file, to $JUMPDRIFT_OUT_DIR/<default name> when that variable is set,
/// or to `out` otherwise. Diagnostics and warnings go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jumpdrift::cli
