#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bxc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // a verification or simulation check failed
inline constexpr int kExitUsage = 2;

/// Entry point behind the bxc binary. `args` excludes the program name.
/// Subcommands: table, curves, verify, simulate.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bxc
