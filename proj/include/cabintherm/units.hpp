#pragma once

#include <numbers>

namespace cabintherm {

inline constexpr double kZeroCelsius = 273.15;
inline constexpr double kPi = std::numbers::pi;

// Internal quantities are SI with temperatures in kelvin; Celsius and degrees
// only appear at file and report boundaries.
constexpr double to_kelvin(double celsius) { return celsius + kZeroCelsius; }
constexpr double to_celsius(double kelvin) { return kelvin - kZeroCelsius; }
constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace cabintherm
