#pragma once

#include <iosfwd>

namespace faultnet::cli {

/// Exit statuses are a stable scripting contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitDivergence = 3;

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace faultnet::cli
