#pragma once

namespace tgqpt {

/// Speed of light in cm per femtosecond.
inline constexpr double kSpeedOfLightCmPerFs = 2.99792458e-5;

/// Converts a wavenumber (cm^-1) to an angular frequency (rad/fs),
/// 2*pi*c*w. All phase evolution e^{-i w T} goes through this one bridge.
double wavenumber_to_angular_frequency(double wavenumber_cm);

}  // namespace tgqpt
