#pragma once

#include <iosfwd>

namespace tlearn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

/// Entry point of the `tlearn` tool. Data goes to `out` unless written to a
/// file; diagnostics and run summaries go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tlearn
