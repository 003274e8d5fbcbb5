#pragma once

#include <iosfwd>
#include <string_view>

namespace vortex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // computation failed
inline constexpr int kExitUsage = 2;    // bad arguments or unreadable input

std::string_view tool_name();
std::string_view tool_version();

// Entry point of the command-line tool. `out` receives results written to
// "-", `err` receives diagnostics.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vortex::cli
