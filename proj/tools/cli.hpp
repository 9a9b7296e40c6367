// Command-line front end shared by the `vrp` binary and the tests.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vrp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerificationFailed = 2;

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Flat `key = value` lines (`#` comments, blank lines ignored) turned into
/// `--key=value` tokens. Throws std::runtime_error on unreadable files or
/// lines without '='.
std::vector<std::string> config_tokens(const std::string& path);

}  // namespace vrp::cli
