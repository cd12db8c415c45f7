#pragma once

#include <iosfwd>

namespace vrnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;  ///< domain-negative result (not an NE, infeasible, mismatch)
inline constexpr int kExitUsage = 2;     ///< bad flags, unreadable or invalid input

/// Entry point of the `vrnet` tool; all output goes to `out` / `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vrnet::cli
