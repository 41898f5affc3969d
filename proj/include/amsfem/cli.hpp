#pragma once

// Command-line front end: generate | recover | solve | study.
// Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical failure.

#include <iosfwd>

namespace amsfem::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace amsfem::cli
