/// @file  cli.hpp
/// @brief Command-line front end

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aclbdd::cli {

/// Exit status of every subcommand, by outcome class.
enum ExitCode : int {
  kOk = 0,
  /// Unreadable file, parse or compile error, bad condition.
  kInputError = 1,
  /// Table larger than the row budget; rerun with --summary.
  kRowBudget = 2,
  /// diff: the rule sets differ.
  kDifferences = 3,
  /// check: redundant rules found.
  kRedundant = 4,
  kUsage = 64,
};

/// `args[0]` is the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace aclbdd::cli
