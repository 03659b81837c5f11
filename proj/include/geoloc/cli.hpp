#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace geoloc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs the command line front end. args excludes the program name.
/// Subcommands: place, fit, locate, simulate, eval.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geoloc::cli
