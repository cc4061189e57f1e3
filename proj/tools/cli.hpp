#pragma once

#include <iosfwd>

namespace photon_beat::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;  ///< fit or quadrature failure
inline constexpr int exit_usage = 2;    ///< bad flags, config or parameters

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace photon_beat::cli
