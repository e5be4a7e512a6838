#pragma once

#include <ostream>

namespace sparsepac::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitAssertion = 2;

// Entry point of the sparsepac command line:
//   sparsepac <gen-data|sample|certify|select|rate-exp|verify> [--config FILE] [flags]
// A JSON config file may set any flag by its long name; explicit flags win.
// Returns 0 on success, 1 on invalid input, 2 on a failed statistical assertion.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sparsepac::cli
