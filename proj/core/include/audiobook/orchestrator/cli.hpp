#pragma once

#include <iosfwd>

namespace audiobook {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRender = 2;
inline constexpr int kExitUsage = 64;

// Subcommands: parse, check, plan, assets index, render, report.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace audiobook
