#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace recert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInvariant = 2;

/// Entry point for the `recert` tool. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace recert::cli
