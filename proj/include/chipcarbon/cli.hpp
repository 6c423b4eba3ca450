#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chipcarbon {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitInternalError = 3;

/// Runs one command. `args` excludes the program name. Reports and
/// manifest.json are written under --out; progress goes to `out`,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace chipcarbon
