#pragma once

// Phenomenological I-V synthesis for the pillar box.
//
// Drain sweeps map the sample voltage onto drive energy 1000 |V| meV.
// V >= 0 uses the forward model (threshold doublet, E_c peak ladder,
// e -> 2e staircase with hysteresis); V < 0 uses the reverse model (listed
// charging sequence, interference, satellites, channel closure and
// reopening). Gate sweeps place peaks at onset + k * period.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nanoshuttle/electrostatics.hpp"
#include "nanoshuttle/mechanics.hpp"
#include "nanoshuttle/spectrum.hpp"

namespace nanoshuttle {

enum class SweepDirection { Up, Down };
enum class SweepKind { Drain, Gate };

enum class PumpMode { SingleE, DoubleE };
constexpr int charge_multiplier(PumpMode m) { return m == PumpMode::DoubleE ? 2 : 1; }

enum class ChannelPhase { Open, Interfering, Closed, Reopened };

/// Peak positions above the forward threshold.
enum class PeakLadder {
  Charging,  // threshold + k * E_c
  Quantum,   // distinct box levels above threshold
};

struct SweepConfig {
  double v_start = 0.0;
  double v_end = 1.0;
  double step = 1e-3;
  SweepDirection direction = SweepDirection::Up;
  SweepKind kind = SweepKind::Drain;
  std::uint64_t seed = 0;
  /// Pump mode at the first sample; defaults depend on direction (see
  /// simulate_drain_sweep).
  std::optional<PumpMode> initial_mode;

  /// Throws InputError on step <= 0 or a direction that contradicts the
  /// start/end ordering.
  void validate() const;
};

struct DeviceModel {
  BoxGeometry geometry;
  JunctionParams junction;
  GateParams gate;
  MechanicalParams mech;
  double peak_width_mV = 5.0;     // Gaussian sigma in drive energy
  double peak_current_pA = 0.0;   // e / RC by default
  double charging_energy_meV = 35.0;  // forward peak spacing
  bool counter_current_enabled = false;
  bool noise_enabled = true;
  PeakLadder ladder = PeakLadder::Charging;

  /// Every sub-model at its default, with gate alpha/C_g derived from the
  /// gate period and junction capacitance and peak current = e / RC.
  static DeviceModel defaults();

  void validate() const;
};

// States that anchor the synthesized features.
namespace landmarks {
inline constexpr QuantumState kForwardThreshold{3, 2, 2};
inline constexpr QuantumState kStaircaseUp{5, 4, 4};
inline constexpr QuantumState kStaircaseDown{4, 4, 4};
inline constexpr QuantumState kCounterCurrentStart{1, 2, 2};
inline constexpr QuantumState kCounterCurrentEnd{2, 2, 2};
inline constexpr QuantumState kSatelliteOnset{4, 4, 1};
inline constexpr QuantumState kChannelClosure{4, 4, 2};
inline constexpr QuantumState kChannelReopening{5, 4, 2};
inline constexpr QuantumState kGateCharging{2, 2, 3};
}  // namespace landmarks

/// The first eight reverse-bias peak states, in charging order.
std::span<const QuantumState> reverse_charging_sequence();

/// Forward peak centres (meV), from the threshold doublet up to max_energy.
std::vector<double> forward_peak_energies(const DeviceModel& model, double max_energy_meV);

struct ReversePeak {
  double energy_meV = 0.0;
  QuantumState state;
};

struct ReverseSchedule {
  std::vector<ReversePeak> peaks;  // the listed charging sequence
  double interference_onset_meV = 0.0;
  double satellite_onset_meV = 0.0;
  double closure_meV = 0.0;
  double reopening_meV = 0.0;
};

ReverseSchedule reverse_peak_energies(const DeviceModel& model);

/// Phase of the reverse channel at a given drive energy.
ChannelPhase channel_phase(const ReverseSchedule& schedule, double energy_meV);

/// Amplitude factor 1 / (1 + |nx - ny| / 2).
double interference_modulation(QuantumState state);

/// One step of the e/2e staircase: up-sweeps switch to 2e once the drive
/// energy reaches E([5,4,4]); down-sweeps drop back to 1e below E([4,4,4]).
PumpMode hysteresis_step(PumpMode mode, SweepDirection direction, double energy_meV,
                         const StateTable& table);

enum class AnnotationLabel {
  Threshold,
  Mode2e,
  Mode1e,
  PhaseInterfering,
  PhaseClosed,
  PhaseReopened,
  SatelliteOnset,
};

std::string_view to_string(AnnotationLabel label);
std::optional<AnnotationLabel> parse_annotation_label(std::string_view text);

struct Annotation {
  double voltage_V = 0.0;
  AnnotationLabel label = AnnotationLabel::Threshold;
};

struct TracePoint {
  double voltage_V = 0.0;
  double current_pA = 0.0;
  double drive_energy_meV = 0.0;
};

struct IVTrace {
  std::vector<TracePoint> points;
  SweepConfig sweep;
  std::vector<Annotation> annotations;

  std::optional<double> first_annotation(AnnotationLabel label) const;
};

/// Sample voltages for a sweep. Values are built from the lower endpoint so
/// up- and down-sweeps over one range visit bitwise-identical voltages.
std::vector<double> sweep_voltages(const SweepConfig& sweep);

IVTrace simulate_drain_sweep(const DeviceModel& model, const SweepConfig& sweep);

IVTrace simulate_gate_sweep(const DeviceModel& model, const SweepConfig& sweep, double vds_V);

/// CSV: voltage_V,current_pA,annotation.
void write_trace_csv(std::ostream& os, const IVTrace& trace);

/// Parses the trace CSV. Throws InputError naming the offending line.
IVTrace read_trace_csv(std::istream& is);

}  // namespace nanoshuttle
