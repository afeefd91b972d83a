#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sybilblind::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `out`, diagnostics and usage text to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// FNV-1a 64 of a file's bytes as 16 hex digits.
std::string file_digest(const std::string& path);

}  // namespace sybilblind::cli
