#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace metgen {

inline constexpr const char* kToolVersion = "0.1.0";

// Runs one subcommand: generate, evaluate, decompose, synth, rank or losses.
// `args` excludes the program name. Reports go to `out` unless --out names a
// file; diagnostics go to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Lowercase hex SHA-256 of a file's bytes. Throws Error{ParseError} when the
// file cannot be read.
std::string sha256_file(const std::string& path);

}  // namespace metgen
