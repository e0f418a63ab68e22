#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tpatch::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInputError = 2,
  kUnrepairable = 3,  // also a failed verification or selftest
  kPrecondition = 4,
  kBudgetExceeded = 5,
};

// Runs one subcommand. `args` excludes the program name. Primary output goes
// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Hex SHA-256 of `text`.
std::string sha256_hex(const std::string& text);

}  // namespace tpatch::cli
