#pragma once

// Command-line front end. run_cli is the whole program minus argv handling,
// so tests can drive it in process.
//
// Exit codes: 0 success (including a rejected null), 2 bad flags or
// unreadable input, 3 degenerate evaluation point, 4 non-overlapping
// training ranges, 1 anything else.

#include <iosfwd>
#include <string>
#include <vector>

namespace xformtest {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitNoOverlap = 4;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* version() noexcept;

}  // namespace xformtest
