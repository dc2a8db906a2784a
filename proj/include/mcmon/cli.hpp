#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcmon::cli {

// Process exit statuses of the `mcmon` tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitFaultStop = 4;

// Runs one command line. `args` excludes the program name. `in`/`out`/`err`
// stand in for the standard streams; file paths given as "-" use them.
int command_dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace mcmon::cli
