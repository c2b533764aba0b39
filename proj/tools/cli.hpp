#pragma once

#include <ostream>

namespace siddmd::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

// Runs the command line front end; diagnostics go to `err` as a single JSON
// line {"error": kind, "message": text}.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace siddmd::cli
