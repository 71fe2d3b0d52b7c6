#include "nanoshuttle/mechanics.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nanoshuttle/constants.hpp"

namespace nanoshuttle {

using namespace constants;

namespace {

constexpr double kCalibrationStress_Pa = 200e9;
constexpr double kCalibrationArea_nm2 = 64.0;
constexpr double kCalibrationSpring_N_per_m = 0.16;

double volume_factor(AffectedVolume v) { return v == AffectedVolume::Third ? 1.0 / 3.0 : 1.0; }

// Charge flux per metre of displacement: e * A * n_e * Gamma * factor, in A/m.
double flux_per_metre(double area_nm2, double density_per_cm3, double rate_per_s,
                      AffectedVolume v) {
  const double area_m2 = area_nm2 * kNanometre * kNanometre;
  const double density_per_m3 = density_per_cm3 * 1e6;
  return kElementaryCharge * area_m2 * volume_factor(v) * density_per_m3 * rate_per_s;
}

}  // namespace

void MechanicalParams::validate() const {
  if (!(spring_N_per_m > 0.0) || !(density_kg_m3 > 0.0) || !(box_volume_m3 > 0.0) ||
      !(tunnel_rate_per_s > 0.0) || !(charge_density_per_cm3 > 0.0)) {
    throw std::invalid_argument(
        "spring constant, density, volume, tunnel rate and charge density must be > 0");
  }
  if (!(noise_amplitude_pA >= 0.0)) {
    throw std::invalid_argument("noise amplitude must be >= 0");
  }
  if (!(asymmetry >= 0.0 && asymmetry < 1.0)) {
    throw std::invalid_argument(fmt::format("asymmetry must lie in [0,1), got {}", asymmetry));
  }
}

double spring_constant(double stress_Pa, double area_nm2) {
  if (!(stress_Pa > 0.0) || !(area_nm2 > 0.0)) {
    throw std::invalid_argument("stress and area must be positive");
  }
  return kCalibrationSpring_N_per_m * (stress_Pa / kCalibrationStress_Pa) *
         (area_nm2 / kCalibrationArea_nm2);
}

double mechanical_work_meV(double spring_N_per_m, double displacement_nm) {
  if (!(spring_N_per_m > 0.0) || !(displacement_nm >= 0.0)) {
    throw std::invalid_argument("need K > 0 and dX >= 0");
  }
  const double dx = displacement_nm * kNanometre;
  return 0.5 * spring_N_per_m * dx * dx / kJoulePerMilliElectronVolt;
}

double displacement_from_noise_nm(double noise_pA, double area_nm2,
                                  double charge_density_per_cm3, double tunnel_rate_per_s,
                                  AffectedVolume volume) {
  if (!(noise_pA > 0.0) || !(area_nm2 > 0.0) || !(charge_density_per_cm3 > 0.0) ||
      !(tunnel_rate_per_s > 0.0)) {
    throw std::invalid_argument("noise inversion inputs must be positive");
  }
  const double flux = flux_per_metre(area_nm2, charge_density_per_cm3, tunnel_rate_per_s, volume);
  return noise_pA * kPicoampere / flux / kNanometre;
}

double noise_current_pA(double displacement_nm, double area_nm2,
                        double charge_density_per_cm3, double tunnel_rate_per_s,
                        AffectedVolume volume) {
  const double flux = flux_per_metre(area_nm2, charge_density_per_cm3, tunnel_rate_per_s, volume);
  return displacement_nm * kNanometre * flux / kPicoampere;
}

OscillatorFrequencies oscillator_frequencies(double spring_N_per_m, double density_kg_m3,
                                             double volume_m3) {
  if (!(spring_N_per_m > 0.0) || !(density_kg_m3 > 0.0) || !(volume_m3 > 0.0)) {
    throw std::invalid_argument("K, rho and V must be positive");
  }
  const double mass = density_kg_m3 * volume_m3;
  const double w0 = std::sqrt(spring_N_per_m / mass);
  return {w0, kVibrationModeMultiple * w0};
}

CouplingEstimate coupling_lambda(double charging_energy_meV, double level_gap_meV) {
  if (!(level_gap_meV > 0.0)) throw std::invalid_argument("level gap must be positive");
  if (!(charging_energy_meV > level_gap_meV)) {
    throw std::domain_error(fmt::format(
        "E_c = {} meV does not exceed the level gap {} meV: no mechanical budget",
        charging_energy_meV, level_gap_meV));
  }
  const double split = charging_energy_meV - level_gap_meV;
  return {split, split / level_gap_meV};
}

ZigzagSignal zigzag_noise(const MechanicalParams& params, std::size_t n_samples,
                          std::uint64_t seed) {
  params.validate();
  if (n_samples == 0) throw std::invalid_argument("zigzag_noise needs at least one sample");

  std::mt19937_64 gen(seed);
  const double up = params.noise_amplitude_pA * (1.0 + params.asymmetry);
  const double down = params.noise_amplitude_pA * (1.0 - params.asymmetry);

  ZigzagSignal sig;
  sig.seed = seed;
  sig.samples_pA.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    // 53-bit uniform in [0,1); avoids implementation-defined distributions.
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const double jitter = 0.5 + u;
    sig.samples_pA[i] = (i % 2 == 0) ? up * jitter : -down * jitter;
  }
  sig.mean_pA = std::accumulate(sig.samples_pA.begin(), sig.samples_pA.end(), 0.0) /
                static_cast<double>(n_samples);
  return sig;
}

void write_zigzag_csv(std::ostream& os, const ZigzagSignal& signal) {
  os << "sample_index,current_pA\n";
  for (std::size_t i = 0; i < signal.samples_pA.size(); ++i) {
    fmt::print(os, "{},{:.10g}\n", i, signal.samples_pA[i]);
  }
}

}  // namespace nanoshuttle
