#pragma once

// Electromechanical shuttle arithmetic and the sub-threshold zig-zag
// noise generator.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace nanoshuttle {

struct MechanicalParams {
  double spring_N_per_m = 0.16;
  double stress_Pa = 200e9;  // informational; spring_N_per_m is authoritative
  double density_kg_m3 = 2.4e3;
  double box_volume_m3 = 2e-25;
  double tunnel_rate_per_s = 1e12;
  double charge_density_per_cm3 = 1e16;
  double noise_amplitude_pA = 3.0;
  double asymmetry = 0.3;  // in [0, 1)

  void validate() const;
};

/// How the volume swept by a wall displacement dX is counted.
enum class AffectedVolume {
  Slab,   // A * dX
  Third,  // A * dX / 3
};

/// Stress-times-area spring constant, calibrated linearly through
/// (200 GPa, 64 nm^2) -> 0.16 N/m.
double spring_constant(double stress_Pa, double area_nm2);

/// K dX^2 / 2, in meV.
double mechanical_work_meV(double spring_N_per_m, double displacement_nm);

/// Inverts dI = e * dV * n_e * Gamma for the wall displacement dX (nm).
double displacement_from_noise_nm(double noise_pA, double area_nm2,
                                  double charge_density_per_cm3, double tunnel_rate_per_s,
                                  AffectedVolume volume = AffectedVolume::Slab);

/// Forward form: current excursion (pA) produced by a displacement dX.
double noise_current_pA(double displacement_nm, double area_nm2,
                        double charge_density_per_cm3, double tunnel_rate_per_s,
                        AffectedVolume volume = AffectedVolume::Slab);

/// Mode multiple of the fundamental found for the box vibration.
inline constexpr double kVibrationModeMultiple = 59.0;

struct OscillatorFrequencies {
  double omega0_per_s = 0.0;
  double omega_net_per_s = 0.0;
};

/// omega0 = sqrt(K / (rho V)); omega_net = 59 omega0.
OscillatorFrequencies oscillator_frequencies(double spring_N_per_m, double density_kg_m3,
                                             double volume_m3);

struct CouplingEstimate {
  double gap_split_meV = 0.0;  // dE_e
  double lambda = 0.0;         // dE_e / dE_n
};

/// dE_e = E_c - dE_n, lambda = dE_e / dE_n. Throws std::domain_error when
/// E_c <= dE_n (no mechanical budget left).
CouplingEstimate coupling_lambda(double charging_energy_meV, double level_gap_meV);

struct ZigzagSignal {
  std::vector<double> samples_pA;
  std::uint64_t seed = 0;
  double mean_pA = 0.0;
};

/// Alternating-sign excursions, starting positive. Positive samples have
/// magnitude dI (1 + a) u, negative ones dI (1 - a) u, with u uniform in
/// [0.5, 1.5) from a seeded mt19937_64.
ZigzagSignal zigzag_noise(const MechanicalParams& params, std::size_t n_samples,
                          std::uint64_t seed);

/// CSV: sample_index,current_pA.
void write_zigzag_csv(std::ostream& os, const ZigzagSignal& signal);

}  // namespace nanoshuttle
