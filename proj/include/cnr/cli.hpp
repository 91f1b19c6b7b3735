#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cnr {

/// Exit codes of the cnr tool.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int environment_wins = 10;
inline constexpr int trace_violation = 20;
inline constexpr int usage = 64;
inline constexpr int malformed_input = 65;
inline constexpr int cap_exceeded = 70;
}  // namespace exit_code

/// Runs one subcommand (solve, simulate, check-trace, gen-arena, serve).
/// `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cnr
