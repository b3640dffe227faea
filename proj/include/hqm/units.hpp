#pragma once

#include <numbers>

namespace hqm::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Vacuum permeability, T m / A.
inline constexpr double mu0 = 1.25663706212e-6;
/// Reduced Planck constant, J s.
inline constexpr double hbar = 1.054571817e-34;
/// Electron gyromagnetic ratio, rad s^-1 T^-1 (sign retained).
inline constexpr double gamma_e = -1.76e11;

inline constexpr double gauss = 1e-4;  // tesla
inline constexpr double nano = 1e-9;
inline constexpr double micro = 1e-6;

/// Internal frequencies are angular; user-facing ones are ordinary.
constexpr double hz_to_rad(double hz) { return two_pi * hz; }
constexpr double rad_to_hz(double rad_per_s) { return rad_per_s / two_pi; }

}  // namespace hqm::units
