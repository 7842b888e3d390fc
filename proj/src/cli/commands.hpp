#pragma once

#include <iosfwd>

namespace sw::cli {

// Exit codes.
constexpr int kOk           = 0;
constexpr int kPrecondition = 2;
constexpr int kNumeric      = 3;
constexpr int kInfeasible   = 4;

/// Parses argv and runs one subcommand. Messages go to err, results to out
/// unless an --output path is given.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace sw::cli
