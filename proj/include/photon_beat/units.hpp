#pragma once

#include <numbers>

// Everything inside the library is SI: seconds and rad/s. The helpers below
// convert from the microsecond / megahertz values used on the command line.
namespace photon_beat::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double microsecond = 1e-6;
inline constexpr double nanosecond = 1e-9;

constexpr double from_us(double us) { return us * microsecond; }
constexpr double to_us(double s) { return s / microsecond; }
constexpr double from_ns(double ns) { return ns * nanosecond; }

/// Ordinary frequency in MHz to angular frequency in rad/s (exact factor 2π).
constexpr double angular_from_mhz(double mhz) { return 2.0 * pi * mhz * 1e6; }
constexpr double mhz_from_angular(double rad_per_s) { return rad_per_s / (2.0 * pi * 1e6); }
constexpr double angular_from_thz(double thz) { return 2.0 * pi * thz * 1e12; }

}  // namespace photon_beat::units
