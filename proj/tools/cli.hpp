#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace riskcal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the `riskcal` binary. `args` excludes the program name.
/// Subcommands: toy, fit, experiment, discretize.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace riskcal::cli
