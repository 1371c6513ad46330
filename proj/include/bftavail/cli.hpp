#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bftavail {

// Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// Entry point for the `bftavail` command line; args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bftavail
