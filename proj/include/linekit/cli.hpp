#pragma once

#include <ostream>

namespace linekit::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1; // bench criterion failed or unexpected error
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitEmpty = 4;

/// Runs one subcommand. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace linekit::cli
