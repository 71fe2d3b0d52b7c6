#include "nanoshuttle/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "nanoshuttle/constants.hpp"
#include "nanoshuttle/errors.hpp"

namespace nanoshuttle {

namespace {

double gaussian(double x, double centre, double sigma) {
  const double z = (x - centre) / sigma;
  return std::exp(-0.5 * z * z);
}

// Noise is confined below the threshold peak's support.
constexpr double kNoiseClearanceSigmas = 4.0;
// Peaks are generated this far past the sweep end so edge samples see their tails.
constexpr double kPeakMarginSigmas = 8.0;
// Height of the [4,4,2] peak relative to the first reverse peak.
constexpr double kClosurePeakFraction = 0.1;
constexpr int kInterferenceMinImbalance = 2;

constexpr std::array<QuantumState, 8> kReverseSequence{{
    {3, 2, 1},
    {4, 2, 1},
    {4, 3, 1},
    {5, 2, 1},
    {4, 4, 1},
    {6, 1, 1},
    {6, 2, 1},
    {6, 3, 1},
}};

struct Feature {
  double centre_meV;
  double sigma_meV;
  double height_pA;
};

struct ReverseFeatures {
  std::vector<Feature> before_closure;
  std::vector<Feature> after_reopening;
};

ReverseFeatures build_reverse_features(const DeviceModel& model, const ReverseSchedule& sched,
                                       double max_energy_meV) {
  const double h = model.peak_current_pA;
  const double sigma = model.peak_width_mV;
  const double first = sched.peaks.front().energy_meV;
  const double span = sched.closure_meV - first;
  const auto envelope = [&](double e) { return 1.0 - (1.0 - kClosurePeakFraction) * (e - first) / span; };

  ReverseFeatures f;
  std::vector<ReversePeak> mains = sched.peaks;
  mains.push_back({sched.closure_meV, landmarks::kChannelClosure});
  for (const auto& p : mains) {
    const double mod =
        p.energy_meV >= sched.interference_onset_meV ? interference_modulation(p.state) : 1.0;
    f.before_closure.push_back({p.energy_meV, sigma, h * envelope(p.energy_meV) * mod});
  }
  // Satellites: half width, half height, midway between the main peaks
  // from the satellite onset up to closure.
  for (std::size_t i = 0; i + 1 < mains.size(); ++i) {
    if (mains[i].energy_meV < sched.satellite_onset_meV) continue;
    const double mid = 0.5 * (mains[i].energy_meV + mains[i + 1].energy_meV);
    f.before_closure.push_back({mid, 0.5 * sigma, 0.5 * h * envelope(mid)});
  }
  const double broad = 2.0 * sigma;
  for (int k = 0;; ++k) {
    const double c = sched.reopening_meV + k * model.charging_energy_meV;
    if (c > max_energy_meV + kPeakMarginSigmas * broad) break;
    f.after_reopening.push_back({c, broad, h});
  }
  return f;
}

double sum_features(const std::vector<Feature>& features, double energy) {
  double s = 0.0;
  for (const auto& f : features) s += f.height_pA * gaussian(energy, f.centre_meV, f.sigma_meV);
  return s;
}

class AnnotationLog {
 public:
  void add(double v, AnnotationLabel l) { items_.push_back({v, l}); }
  std::vector<Annotation> take() { return std::move(items_); }

 private:
  std::vector<Annotation> items_;
};

// Adds seeded zig-zag noise to the listed sample indices, ordered by |V| so
// the realization at a given voltage does not depend on sweep direction.
void add_noise(const DeviceModel& model, std::uint64_t seed, std::vector<std::size_t> indices,
               std::vector<TracePoint>& points) {
  if (!model.noise_enabled || indices.empty()) return;
  std::stable_sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(points[a].voltage_V) < std::abs(points[b].voltage_V);
  });
  const ZigzagSignal zig = zigzag_noise(model.mech, indices.size(), seed);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    points[indices[k]].current_pA += zig.samples_pA[k];
  }
}

}  // namespace

void SweepConfig::validate() const {
  if (!(step > 0.0)) throw InputError(fmt::format("sweep step must be > 0, got {}", step));
  if (direction == SweepDirection::Up && v_end < v_start) {
    throw InputError(fmt::format("up-sweep needs from <= to (got {} -> {})", v_start, v_end));
  }
  if (direction == SweepDirection::Down && v_end > v_start) {
    throw InputError(fmt::format("down-sweep needs from >= to (got {} -> {})", v_start, v_end));
  }
}

DeviceModel DeviceModel::defaults() {
  DeviceModel m;
  m.gate = gate_from_period(1.0, 0.5, junction_capacitance_aF(m.junction));
  const RcLimit rc = rc_limited_current(m.junction.resistance_ohm,
                                        m.junction.rc_capacitance_aF * constants::kAttofarad);
  m.peak_current_pA = rc.peak_current_A / constants::kPicoampere;
  return m;
}

void DeviceModel::validate() const {
  geometry.validate();
  junction.validate();
  gate.validate();
  mech.validate();
  if (!(peak_width_mV > 0.0)) throw std::invalid_argument("peak width must be positive");
  if (!(peak_current_pA > 0.0)) throw std::invalid_argument("peak current must be positive");
  if (!(charging_energy_meV > 0.0)) {
    throw std::invalid_argument("charging energy must be positive");
  }
}

std::span<const QuantumState> reverse_charging_sequence() { return kReverseSequence; }

std::vector<double> forward_peak_energies(const DeviceModel& model, double max_energy_meV) {
  const double threshold = state_energy(landmarks::kForwardThreshold, model.geometry);
  if (max_energy_meV < threshold) {
    throw std::invalid_argument(fmt::format(
        "max energy {} meV is below the forward threshold {} meV", max_energy_meV, threshold));
  }
  std::vector<double> out;
  if (model.ladder == PeakLadder::Quantum) {
    const StateTable table = enumerate_levels(model.geometry, max_energy_meV);
    for (const auto& lvl : table.levels()) {
      if (lvl.energy_meV >= threshold - kDegeneracyTolerance_meV) out.push_back(lvl.energy_meV);
    }
    return out;
  }
  for (int k = 0;; ++k) {
    const double e = threshold + k * model.charging_energy_meV;
    if (e > max_energy_meV) break;
    out.push_back(e);
  }
  return out;
}

ReverseSchedule reverse_peak_energies(const DeviceModel& model) {
  ReverseSchedule s;
  s.interference_onset_meV = -1.0;
  for (const auto& st : kReverseSequence) {
    const double e = state_energy(st, model.geometry);
    s.peaks.push_back({e, st});
    if (s.interference_onset_meV < 0.0 && lateral_imbalance(st) >= kInterferenceMinImbalance) {
      s.interference_onset_meV = e;
    }
  }
  s.satellite_onset_meV = state_energy(landmarks::kSatelliteOnset, model.geometry);
  s.closure_meV = state_energy(landmarks::kChannelClosure, model.geometry);
  s.reopening_meV = state_energy(landmarks::kChannelReopening, model.geometry);
  return s;
}

ChannelPhase channel_phase(const ReverseSchedule& schedule, double energy_meV) {
  if (energy_meV >= schedule.reopening_meV) return ChannelPhase::Reopened;
  if (energy_meV > schedule.closure_meV) return ChannelPhase::Closed;
  if (energy_meV >= schedule.interference_onset_meV) return ChannelPhase::Interfering;
  return ChannelPhase::Open;
}

double interference_modulation(QuantumState state) {
  return 1.0 / (1.0 + 0.5 * static_cast<double>(lateral_imbalance(state)));
}

PumpMode hysteresis_step(PumpMode mode, SweepDirection direction, double energy_meV,
                         const StateTable& table) {
  if (direction == SweepDirection::Up && mode == PumpMode::SingleE &&
      energy_meV >= table.energy_of(landmarks::kStaircaseUp)) {
    return PumpMode::DoubleE;
  }
  if (direction == SweepDirection::Down && mode == PumpMode::DoubleE &&
      energy_meV < table.energy_of(landmarks::kStaircaseDown)) {
    return PumpMode::SingleE;
  }
  return mode;
}

std::string_view to_string(AnnotationLabel label) {
  switch (label) {
    case AnnotationLabel::Threshold: return "THRESHOLD";
    case AnnotationLabel::Mode2e: return "MODE_2E";
    case AnnotationLabel::Mode1e: return "MODE_1E";
    case AnnotationLabel::PhaseInterfering: return "PHASE_INTERFERING";
    case AnnotationLabel::PhaseClosed: return "PHASE_CLOSED";
    case AnnotationLabel::PhaseReopened: return "PHASE_REOPENED";
    case AnnotationLabel::SatelliteOnset: return "SATELLITE_ONSET";
  }
  return "";
}

std::optional<AnnotationLabel> parse_annotation_label(std::string_view text) {
  for (auto l : {AnnotationLabel::Threshold, AnnotationLabel::Mode2e, AnnotationLabel::Mode1e,
                 AnnotationLabel::PhaseInterfering, AnnotationLabel::PhaseClosed,
                 AnnotationLabel::PhaseReopened, AnnotationLabel::SatelliteOnset}) {
    if (to_string(l) == text) return l;
  }
  return std::nullopt;
}

std::optional<double> IVTrace::first_annotation(AnnotationLabel label) const {
  for (const auto& a : annotations) {
    if (a.label == label) return a.voltage_V;
  }
  return std::nullopt;
}

std::vector<double> sweep_voltages(const SweepConfig& sweep) {
  sweep.validate();
  const double lo = std::min(sweep.v_start, sweep.v_end);
  const double hi = std::max(sweep.v_start, sweep.v_end);
  if (lo == hi) return {};

  // Grid anchored at the endpoint nearer zero, so |V| lands on k * step.
  const bool anchor_low = std::abs(lo) <= std::abs(hi);
  const double anchor = anchor_low ? lo : hi;
  const double sign = anchor_low ? 1.0 : -1.0;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / sweep.step + 1e-9));

  std::vector<double> v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) v[k] = anchor + sign * static_cast<double>(k) * sweep.step;
  std::sort(v.begin(), v.end());
  if (sweep.direction == SweepDirection::Down) std::reverse(v.begin(), v.end());
  return v;
}

IVTrace simulate_drain_sweep(const DeviceModel& model, const SweepConfig& sweep) {
  model.validate();
  sweep.validate();
  if (sweep.kind != SweepKind::Drain) throw InputError("simulate_drain_sweep needs a drain sweep");

  IVTrace trace;
  trace.sweep = sweep;
  const std::vector<double> volts = sweep_voltages(sweep);
  if (volts.empty()) return trace;

  const BoxGeometry& g = model.geometry;
  const double sigma = model.peak_width_mV;
  const double h = model.peak_current_pA;
  const double fwd_threshold = state_energy(landmarks::kForwardThreshold, g);
  const double stair_up = state_energy(landmarks::kStaircaseUp, g);
  const double counter_lo = state_energy(landmarks::kCounterCurrentStart, g);
  const double counter_hi = state_energy(landmarks::kCounterCurrentEnd, g);
  const double counter_mid = 0.5 * (counter_lo + counter_hi);
  const StateTable table =
      enumerate_levels(g, std::max(stair_up, state_energy(landmarks::kStaircaseDown, g)) + 1.0);
  const ReverseSchedule sched = reverse_peak_energies(model);
  const double rev_threshold = sched.peaks.front().energy_meV;

  double max_energy = 0.0;
  for (double v : volts) max_energy = std::max(max_energy, 1000.0 * std::abs(v));

  std::vector<double> fwd_peaks;
  if (max_energy + kPeakMarginSigmas * sigma >= fwd_threshold) {
    fwd_peaks = forward_peak_energies(model, max_energy + kPeakMarginSigmas * sigma);
  }
  const ReverseFeatures rev = build_reverse_features(model, sched, max_energy);

  PumpMode mode = sweep.initial_mode.value_or(
      sweep.direction == SweepDirection::Down && 1000.0 * sweep.v_start >= stair_up
          ? PumpMode::DoubleE
          : PumpMode::SingleE);

  AnnotationLog log;
  std::vector<std::size_t> noisy;
  // -1 until the first sample of the relevant branch has been seen.
  int prev_above = -1;
  int prev_phase = -1;
  int prev_satellite = -1;

  trace.points.reserve(volts.size());
  for (std::size_t i = 0; i < volts.size(); ++i) {
    const double v = volts[i];
    const double e = 1000.0 * std::abs(v);
    const bool forward = v >= 0.0;
    double current = 0.0;

    if (forward) {
      const PumpMode next = hysteresis_step(mode, sweep.direction, e, table);
      if (next != mode) {
        log.add(v, next == PumpMode::DoubleE ? AnnotationLabel::Mode2e : AnnotationLabel::Mode1e);
        mode = next;
      }
      double peaks = 0.0;
      for (double c : fwd_peaks) peaks += h * gaussian(e, c, sigma);
      current = charge_multiplier(mode) * peaks;
      if (model.counter_current_enabled && e >= counter_lo && e <= counter_hi) {
        current -= h * gaussian(e, counter_mid, sigma);
      }
      prev_phase = -1;
      prev_satellite = -1;
    } else {
      const ChannelPhase phase = channel_phase(sched, e);
      if (prev_phase >= 0 && prev_phase != static_cast<int>(phase)) {
        switch (phase) {
          case ChannelPhase::Interfering: log.add(v, AnnotationLabel::PhaseInterfering); break;
          case ChannelPhase::Closed: log.add(v, AnnotationLabel::PhaseClosed); break;
          case ChannelPhase::Reopened: log.add(v, AnnotationLabel::PhaseReopened); break;
          case ChannelPhase::Open: break;
        }
      }
      prev_phase = static_cast<int>(phase);
      const int satellite = e >= sched.satellite_onset_meV ? 1 : 0;
      if (prev_satellite >= 0 && prev_satellite != satellite) {
        log.add(v, AnnotationLabel::SatelliteOnset);
      }
      prev_satellite = satellite;

      if (phase == ChannelPhase::Reopened) {
        current = sum_features(rev.after_reopening, e);
      } else if (phase != ChannelPhase::Closed) {
        current = sum_features(rev.before_closure, e);
      }
    }

    const double threshold = forward ? fwd_threshold : rev_threshold;
    const int above = e >= threshold ? 1 : 0;
    if (prev_above >= 0 && prev_above != above) log.add(v, AnnotationLabel::Threshold);
    prev_above = above;
    if (e < threshold - kNoiseClearanceSigmas * sigma) noisy.push_back(i);

    trace.points.push_back({v, current, e});
  }

  add_noise(model, sweep.seed, std::move(noisy), trace.points);
  trace.annotations = log.take();
  return trace;
}

IVTrace simulate_gate_sweep(const DeviceModel& model, const SweepConfig& sweep, double vds_V) {
  model.validate();
  sweep.validate();
  if (sweep.kind != SweepKind::Gate) throw InputError("simulate_gate_sweep needs a gate sweep");

  IVTrace trace;
  trace.sweep = sweep;
  const std::vector<double> volts = sweep_voltages(sweep);
  if (volts.empty()) return trace;

  const GateParams& gate = model.gate;
  const double sigma_V = model.peak_width_mV * 1e-3 / gate.alpha;
  const double v_max = *std::max_element(volts.begin(), volts.end());
  std::vector<double> centres;
  for (int k = 0;; ++k) {
    const double c = gate.onset_V + k * gate.period_V;
    if (c > v_max + kPeakMarginSigmas * sigma_V) break;
    centres.push_back(c);
  }

  AnnotationLog log;
  std::vector<std::size_t> noisy;
  int prev_above = -1;
  trace.points.reserve(volts.size());
  for (std::size_t i = 0; i < volts.size(); ++i) {
    const double v = volts[i];
    double current = 0.0;
    for (double c : centres) current += model.peak_current_pA * gaussian(v, c, sigma_V);

    const int above = v >= gate.onset_V ? 1 : 0;
    if (prev_above >= 0 && prev_above != above) log.add(v, AnnotationLabel::Threshold);
    prev_above = above;
    if (v < gate.onset_V - kNoiseClearanceSigmas * sigma_V) noisy.push_back(i);

    trace.points.push_back({v, current, total_drive_energy_meV(vds_V, v, gate.alpha)});
  }

  add_noise(model, sweep.seed, std::move(noisy), trace.points);
  trace.annotations = log.take();
  return trace;
}

}  // namespace nanoshuttle
