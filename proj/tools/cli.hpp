#pragma once

#include <iosfwd>

namespace antfis::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kDataError = 2;
inline constexpr int kNumericalError = 3;

/// Runs one command line. Diagnostics go to `err` as a single line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace antfis::cli
