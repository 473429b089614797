#pragma once

// CGS-Gaussian physical constants (CODATA 2018, 9 significant digits).
namespace freespiral::cgs {

inline constexpr double electron_mass = 9.10938370e-28;     // g
inline constexpr double hbar = 1.05457182e-27;              // erg s
inline constexpr double speed_of_light = 2.99792458e10;     // cm / s
inline constexpr double elementary_charge = 4.80320471e-10; // statC
inline constexpr double electron_volt = 1.60217663e-12;     // erg

}  // namespace freespiral::cgs
