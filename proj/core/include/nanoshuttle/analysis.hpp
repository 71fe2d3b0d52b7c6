#pragma once

// Peak extraction and parameter recovery from I-V traces.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nanoshuttle/electrostatics.hpp"
#include "nanoshuttle/spectrum.hpp"
#include "nanoshuttle/transport.hpp"

namespace nanoshuttle {

struct Peak {
  double voltage_V = 0.0;
  double height_pA = 0.0;
};

inline constexpr double kDefaultMinHeight_pA = 0.2;
inline constexpr double kDefaultMinProminence_pA = 0.1;

/// Local maxima with height > min_height and prominence > min_prominence.
/// Prominence is the drop from the peak to the higher of the two lowest
/// points separating it from taller samples (or the trace edge). A flat-top
/// maximum reports its centre sample. Samples at either trace edge are
/// never peaks. The result is sorted by voltage.
std::vector<Peak> detect_peaks(std::span<const TracePoint> points,
                               double min_height_pA = kDefaultMinHeight_pA,
                               double min_prominence_pA = kDefaultMinProminence_pA);

inline std::vector<Peak> detect_peaks(const IVTrace& trace,
                                      double min_height_pA = kDefaultMinHeight_pA,
                                      double min_prominence_pA = kDefaultMinProminence_pA) {
  return detect_peaks(std::span<const TracePoint>(trace.points), min_height_pA,
                      min_prominence_pA);
}

/// Median of consecutive peak spacings, in volts. Throws
/// InsufficientDataError with fewer than two peaks.
double median_spacing_V(std::span<const Peak> peaks);

/// Median spacing mapped 1 V -> 1000 meV.
double estimate_charging_energy(std::span<const Peak> peaks);

/// Gate period from the median peak spacing, then alpha and C_g.
GateCoupling estimate_alpha(const IVTrace& gate_trace, double capacitance_aF,
                            double min_height_pA = kDefaultMinHeight_pA,
                            double min_prominence_pA = kDefaultMinProminence_pA);

/// Levels within tol of 1000 |V_t| meV, nearest first.
std::vector<EnergyLevel> assign_threshold_state(double threshold_V, const StateTable& table,
                                                double tol_meV);

struct StateAssignment {
  std::size_t peak_index = 0;
  std::vector<EnergyLevel> candidates;
};

struct PeakReport {
  std::vector<Peak> peaks;
  std::optional<double> median_spacing_V;
  std::optional<double> ec_estimate_meV;
  std::vector<StateAssignment> assigned_states;
  std::optional<GateCoupling> gate;  // gate traces only
  std::optional<double> analysis_floor_V;  // |V| below this was skipped
};

struct AnalysisOptions {
  double min_height_pA = kDefaultMinHeight_pA;
  double min_prominence_pA = kDefaultMinProminence_pA;
  double assign_tol_meV = 5.0;
  /// When the trace carries a THRESHOLD annotation, samples with
  /// |V| < |V_threshold| - subthreshold_margin_V are ignored (that is where
  /// the zig-zag noise lives). Disabled when unset.
  std::optional<double> subthreshold_margin_V;
  SweepKind kind = SweepKind::Drain;
  /// Gate traces: drain bias and gate alpha for the drive-energy mapping,
  /// plus the junction capacitance for alpha recovery.
  double vds_V = 0.05;
  double gate_alpha = 0.0;
  double capacitance_aF = 0.0;
};

/// Detects peaks, estimates the spacing-derived quantities and assigns box
/// levels to each peak by its drive energy.
PeakReport analyze_trace(const IVTrace& trace, const StateTable& table,
                         const AnalysisOptions& options);

/// CSV: peak_V,height_pA,candidate_states (states as nx:ny:nz, ';'-joined).
void write_report_csv(std::ostream& os, const PeakReport& report);

/// Multi-line human readable summary.
void write_report_summary(std::ostream& os, const PeakReport& report);

}  // namespace nanoshuttle
