#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace drmine::cli {

inline constexpr const char* kToolName = "drmine";
inline constexpr const char* kToolVersion = "1.0.0";

// Runs one command line (args[0] is the program name). Exit codes: 0 success,
// 1 usage error, 2 data or validation error. Diagnostics go to err; color
// only affects the "error:" / "warning:" prefixes.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err, bool color = false);

}  // namespace drmine::cli
