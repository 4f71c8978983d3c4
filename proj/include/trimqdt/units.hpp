#pragma once

#include <numbers>

namespace trimqdt {

inline constexpr double kPi = std::numbers::pi;

/// Hartree to wavenumber conversion (CODATA 2018). Used only at I/O boundaries.
inline constexpr double kHartreeToCm = 219474.6313632;

/// Hydrogen-atom mass in electron masses (proton + electron).
inline constexpr double kHydrogenMass = 1837.15264734;

inline constexpr double to_cm(double hartree) { return hartree * kHartreeToCm; }
inline constexpr double to_hartree(double cm) { return cm / kHartreeToCm; }

}  // namespace trimqdt
