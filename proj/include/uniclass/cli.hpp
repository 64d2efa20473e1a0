#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uniclass {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitIo = 3;

/// Runs one CLI invocation. `args` excludes the program name. Results go
/// to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uniclass
