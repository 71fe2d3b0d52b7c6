#include "nanoshuttle/electrostatics.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "nanoshuttle/constants.hpp"

namespace nanoshuttle {

using namespace constants;

void JunctionParams::validate() const {
  if (!(face_area_nm2 > 0.0) || !(barrier_thickness_nm > 0.0) ||
      !(relative_permittivity > 0.0) || !(resistance_ohm > 0.0) ||
      !(rc_capacitance_aF > 0.0)) {
    throw std::invalid_argument("junction parameters must all be positive");
  }
}

void GateParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(fmt::format("gate alpha must lie in (0,1), got {}", alpha));
  }
  if (!(gate_capacitance_aF > 0.0)) {
    throw std::invalid_argument("gate capacitance must be positive");
  }
  if (!(period_V > 0.0)) throw std::invalid_argument("gate period must be positive");
}

GateParams gate_from_period(double onset_V, double period_V, double capacitance_aF) {
  const GateCoupling g = gate_alpha_from_period(period_V, capacitance_aF);
  return GateParams{g.alpha, g.gate_capacitance_aF, onset_V, period_V};
}

double junction_capacitance_aF(const JunctionParams& p) {
  p.validate();
  const double area_m2 = p.face_area_nm2 * kNanometre * kNanometre;
  const double d_m = p.barrier_thickness_nm * kNanometre;
  return p.relative_permittivity * kVacuumPermittivity * area_m2 / d_m / kAttofarad;
}

double charging_energy_meV(double capacitance_aF) {
  if (!(capacitance_aF > 0.0)) throw std::invalid_argument("capacitance must be positive");
  const double c = capacitance_aF * kAttofarad;
  return kElementaryCharge * kElementaryCharge / (2.0 * c) / kJoulePerMilliElectronVolt;
}

GateCoupling gate_alpha_from_period(double period_V, double capacitance_aF) {
  if (!(period_V > 0.0) || !(capacitance_aF > 0.0)) {
    throw std::invalid_argument("gate period and capacitance must be positive");
  }
  const double ratio = kElementaryCharge / (period_V * capacitance_aF * kAttofarad);
  // alpha == 1 within rounding is treated as the unphysical boundary.
  if (ratio >= 1.0 - 1e-12) {
    throw std::domain_error(fmt::format(
        "gate period {} V with C = {} aF implies alpha = {} >= 1", period_V,
        capacitance_aF, std::sqrt(ratio)));
  }
  const double alpha = std::sqrt(ratio);
  return {alpha, alpha * capacitance_aF};
}

RcLimit rc_limited_current(double resistance_ohm, double capacitance_F) {
  if (!(resistance_ohm > 0.0) || !(capacitance_F > 0.0)) {
    throw std::invalid_argument("R and C must be positive");
  }
  const double tau = resistance_ohm * capacitance_F;
  return {tau, kElementaryCharge / tau};
}

}  // namespace nanoshuttle
