#pragma once

namespace zfnv::constants {

// mu0/(4 pi), T m/A (CODATA 2018).
inline constexpr double kMu0Over4Pi = 1.00000000055e-7;
// hbar in J s (CODATA 2018, exact).
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kMu0HbarOver4Pi = kMu0Over4Pi * kHbar;

// Gyromagnetic ratios as ordinary frequency, MHz/T.
// Free-electron-like NV electron spin, g = 2.0028.
inline constexpr double kGammaElectron = 28024.95;
// Proton, CODATA 42.577478.
inline constexpr double kGammaProton = 42.577;
// 11B nuclear spin 3/2.
inline constexpr double kGammaBoron11 = 13.66;

// NV ground-state zero-field splitting, MHz.
inline constexpr double kZeroFieldSplitting = 2870.0;

}  // namespace zfnv::constants
