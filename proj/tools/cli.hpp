#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace selcheck::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInfeasible = 2;

/// Whole command line, argv[0] included. Machine-readable output goes to `out` unless --out
/// names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace selcheck::cli
