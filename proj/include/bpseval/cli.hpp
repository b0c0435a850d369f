#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bpseval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs one subcommand. `args` excludes the program name. Diagnostics go to `err`
/// as `code=<name> msg=<text>`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace bpseval::cli
