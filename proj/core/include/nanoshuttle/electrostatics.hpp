#pragma once

// Parallel-plate junction capacitance, charging energy, gate coupling and
// RC-limited current for the double-barrier box.

namespace nanoshuttle {

struct JunctionParams {
  double face_area_nm2 = 64.0;  // tunnel face L x H
  double barrier_thickness_nm = 3.0;
  double relative_permittivity = 11.7;
  double resistance_ohm = 1e11;  // total junction resistance
  /// Order-of-magnitude capacitance entering the RC time constant (1 aF).
  double rc_capacitance_aF = 1.0;

  void validate() const;
};

struct GateCoupling {
  double alpha = 0.0;
  double gate_capacitance_aF = 0.0;
};

struct GateParams {
  double alpha = 0.0;
  double gate_capacitance_aF = 0.0;
  double onset_V = 1.0;
  double period_V = 0.5;

  void validate() const;
};

/// Gate parameters whose alpha and C_g follow from the charging period and
/// the junction capacitance.
GateParams gate_from_period(double onset_V, double period_V, double capacitance_aF);

/// eps_r eps_0 A / D, in aF.
double junction_capacitance_aF(const JunctionParams& p);

/// e^2 / 2C, in meV.
double charging_energy_meV(double capacitance_aF);

/// Solves e = alpha * period * C_g with C_g = alpha * C.
/// Throws std::domain_error if the implied alpha is >= 1, and
/// std::invalid_argument for non-positive inputs.
GateCoupling gate_alpha_from_period(double period_V, double capacitance_aF);

/// e (V_ds + alpha V_gs) per electron, in meV.
constexpr double total_drive_energy_meV(double vds_V, double vgs_V, double alpha) {
  return 1000.0 * (vds_V + alpha * vgs_V);
}

struct RcLimit {
  double tau_s = 0.0;
  double peak_current_A = 0.0;
};

/// tau = R C, I = e / tau. C in farads.
RcLimit rc_limited_current(double resistance_ohm, double capacitance_F);

}  // namespace nanoshuttle
