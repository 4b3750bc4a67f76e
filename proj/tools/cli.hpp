#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ucal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ucal::cli
