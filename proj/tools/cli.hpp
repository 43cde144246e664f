#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace noma::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitSolverFailure = 3;

// args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace noma::cli
