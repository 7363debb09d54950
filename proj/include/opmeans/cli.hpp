#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opmeans::cli {

/// Exit codes: 0 success or descriptive output, 1 a verified property was
/// violated, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line front end. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opmeans::cli
