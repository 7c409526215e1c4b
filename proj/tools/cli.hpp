#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "compdist/verification.hpp"

namespace compdist::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,  ///< domain error or failed verification
    kUsage = 2,    ///< malformed arguments, JSON or CSV
};

/// Runs one command line (without the program name). Everything the command prints goes
/// to `out` only after it has succeeded; diagnostics are a single line on `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// The `verify` subcommand with full control over the suite options.
int run_verify(std::uint64_t seed, const VerifyOptions& options, std::ostream& out);

}  // namespace compdist::cli
