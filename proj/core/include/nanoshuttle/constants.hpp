#pragma once

#include <numbers>

namespace nanoshuttle::constants {

// CODATA 2018 exact/recommended values, SI units.
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPlanck = 6.62607015e-34;             // J s
inline constexpr double kReducedPlanck = kPlanck / (2.0 * std::numbers::pi);
inline constexpr double kElectronMass = 9.1093837015e-31;     // kg
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m

inline constexpr double kNanometre = 1e-9;
inline constexpr double kAttofarad = 1e-18;
inline constexpr double kPicoampere = 1e-12;

/// Joules per meV.
inline constexpr double kJoulePerMilliElectronVolt = kElementaryCharge * 1e-3;

/// Hard-wall confinement prefactor pi^2 hbar^2 / (2 m_e), in eV nm^2
/// (free electron mass). Evaluates to 0.376030...
inline constexpr double kConfinementEvNm2 =
    std::numbers::pi * std::numbers::pi * kReducedPlanck * kReducedPlanck /
    (2.0 * kElectronMass) / kElementaryCharge / (kNanometre * kNanometre);

/// Same prefactor in meV nm^2.
inline constexpr double kConfinementMevNm2 = kConfinementEvNm2 * 1e3;

}  // namespace nanoshuttle::constants
