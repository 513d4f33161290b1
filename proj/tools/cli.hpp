#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace efsis::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

/// Runs one command line (without the program name). Subcommands: rank,
/// evaluate, benchmark, synth, replay.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace efsis::cli
