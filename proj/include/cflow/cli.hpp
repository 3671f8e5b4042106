#pragma once

#include <iosfwd>

namespace cflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitModelError = 1;
inline constexpr int kExitAuditFailure = 2;
inline constexpr int kExitUsage = 64;

/// Entry point of the `cflow` tool: subcommands flow, verify, traces, sweep, example.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cflow::cli
