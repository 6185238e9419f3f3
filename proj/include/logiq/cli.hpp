#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace logiq {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;

// Runs the tool on `args` (without the program name); JSON goes to `out`, errors to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace logiq
