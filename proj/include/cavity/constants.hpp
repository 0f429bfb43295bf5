#pragma once

#include <numbers>

namespace cavity {

// Exact SI defined value.
inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

inline constexpr double kPi = std::numbers::pi;

// Round-trip loss (ppm) <-> finesse: F = 2*pi / (loss * 1e-6).
inline constexpr double kPpm = 1e-6;

}  // namespace cavity
