// units.hpp: physical constants and unit conversions used at the I/O boundary

#pragma once

#include <numbers>

namespace avisim::units {

inline constexpr double pi = std::numbers::pi;

inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double eps0 = 8.8541878128e-12;         // F / m
inline constexpr double c = 299792458.0;                 // m / s
inline constexpr double debye = 3.33564095198152e-30;    // C m
inline constexpr double hbar_ueV_ns = 0.6582119569;      // µeV ns

// Internally rates are angular frequencies in rad/s; trajectories use ns.
constexpr double to_ueV(double rad_per_s) { return hbar_ueV_ns * rad_per_s * 1e-9; }
constexpr double from_ueV(double ueV) { return ueV / hbar_ueV_ns * 1e9; }

constexpr double to_per_ns(double rad_per_s) { return rad_per_s * 1e-9; }
constexpr double from_per_ns(double rad_per_ns) { return rad_per_ns * 1e9; }

constexpr double thz_to_rad_s(double thz) { return 2.0 * pi * thz * 1e12; }
constexpr double rad_s_to_thz(double w) { return w / (2.0 * pi * 1e12); }

constexpr double nm_to_m(double nm) { return nm * 1e-9; }
constexpr double nm3_to_m3(double nm3) { return nm3 * 1e-27; }
constexpr double m3_to_nm3(double m3) { return m3 * 1e27; }

} // namespace avisim::units
