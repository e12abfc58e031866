#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace vortex::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 2, kNumericalFailure = 3 };

// Runs one subcommand: bessel | velocity | spectrum | transversality | branch |
// simulate | cantor | verify. `args` excludes the program name. Prints a one-line
// JSON summary to `out` and usage or parse diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Flat `key = value` (or `key value`) lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path);

// FNV-1a, 64 bit.
std::uint64_t fnv1a(const std::string& text);

// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::string& path, const std::string& content);

// "a:b:n" (n evenly spaced values) or a comma-separated list.
std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace vortex::cli
