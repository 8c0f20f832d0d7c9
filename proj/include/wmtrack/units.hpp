#pragma once

#include <numbers>

namespace wmtrack {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// 13C gyromagnetic ratio in rad/s/T
inline constexpr double gamma_c13 = two_pi * 10.7084e6;

constexpr double hz_to_rad(double f) { return two_pi * f; }
constexpr double rad_to_hz(double w) { return w / two_pi; }
constexpr double deg_to_rad(double d) { return d * pi / 180.0; }
constexpr double rad_to_deg(double r) { return r * 180.0 / pi; }

}  // namespace wmtrack
