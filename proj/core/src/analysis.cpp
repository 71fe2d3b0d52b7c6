#include "nanoshuttle/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nanoshuttle/errors.hpp"

namespace nanoshuttle {

std::vector<Peak> detect_peaks(std::span<const TracePoint> points, double min_height_pA,
                               double min_prominence_pA) {
  if (min_height_pA < 0.0 || min_prominence_pA < 0.0) {
    throw std::invalid_argument("peak thresholds must be >= 0");
  }
  const std::size_t n = points.size();
  const auto y = [&](std::size_t k) { return points[k].current_pA; };

  std::vector<Peak> peaks;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(y(i) > y(i - 1))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && y(j + 1) == y(i)) ++j;
    if (j + 1 >= n || !(y(j + 1) < y(i))) {
      i = j + 1;
      continue;
    }

    const double top = y(i);
    double left_min = top;
    for (std::size_t k = i; k-- > 0;) {
      if (y(k) > top) break;
      left_min = std::min(left_min, y(k));
    }
    double right_min = top;
    for (std::size_t k = j + 1; k < n; ++k) {
      if (y(k) > top) break;
      right_min = std::min(right_min, y(k));
    }
    const double prominence = top - std::max(left_min, right_min);
    if (top > min_height_pA && prominence > min_prominence_pA) {
      peaks.push_back({points[(i + j) / 2].voltage_V, top});
    }
    i = j + 1;
  }

  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.voltage_V < b.voltage_V; });
  return peaks;
}

double median_spacing_V(std::span<const Peak> peaks) {
  if (peaks.size() < 2) {
    throw InsufficientDataError(fmt::format(
        "need at least two peaks for a spacing estimate, found {}", peaks.size()));
  }
  std::vector<double> gaps;
  gaps.reserve(peaks.size() - 1);
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    gaps.push_back(std::abs(peaks[k].voltage_V - peaks[k - 1].voltage_V));
  }
  std::sort(gaps.begin(), gaps.end());
  const std::size_t m = gaps.size() / 2;
  return gaps.size() % 2 == 1 ? gaps[m] : 0.5 * (gaps[m - 1] + gaps[m]);
}

double estimate_charging_energy(std::span<const Peak> peaks) {
  return 1000.0 * median_spacing_V(peaks);
}

GateCoupling estimate_alpha(const IVTrace& gate_trace, double capacitance_aF,
                            double min_height_pA, double min_prominence_pA) {
  const auto peaks = detect_peaks(gate_trace, min_height_pA, min_prominence_pA);
  return gate_alpha_from_period(median_spacing_V(peaks), capacitance_aF);
}

std::vector<EnergyLevel> assign_threshold_state(double threshold_V, const StateTable& table,
                                                double tol_meV) {
  return find_states_near(table, 1000.0 * std::abs(threshold_V), tol_meV);
}

PeakReport analyze_trace(const IVTrace& trace, const StateTable& table,
                         const AnalysisOptions& options) {
  PeakReport report;

  std::span<const TracePoint> window(trace.points);
  const auto threshold = trace.first_annotation(AnnotationLabel::Threshold);
  if (options.subthreshold_margin_V && threshold) {
    const double floor_V = std::abs(*threshold) - *options.subthreshold_margin_V;
    report.analysis_floor_V = floor_V;
    // Noise sits at small |V|; keep the contiguous run at or above the floor.
    std::size_t first = 0;
    std::size_t last = window.size();
    const bool ascending_abs =
        window.size() < 2 || std::abs(window.back().voltage_V) >= std::abs(window.front().voltage_V);
    if (ascending_abs) {
      while (first < last && std::abs(window[first].voltage_V) < floor_V) ++first;
    } else {
      while (last > first && std::abs(window[last - 1].voltage_V) < floor_V) --last;
    }
    window = window.subspan(first, last - first);
  }

  report.peaks = detect_peaks(window, options.min_height_pA, options.min_prominence_pA);
  if (report.peaks.size() >= 2) {
    report.median_spacing_V = median_spacing_V(report.peaks);
    report.ec_estimate_meV = 1000.0 * *report.median_spacing_V;
  }
  if (options.kind == SweepKind::Gate && report.median_spacing_V && options.capacitance_aF > 0.0) {
    report.gate = gate_alpha_from_period(*report.median_spacing_V, options.capacitance_aF);
  }

  for (std::size_t k = 0; k < report.peaks.size(); ++k) {
    const double v = report.peaks[k].voltage_V;
    const double energy = options.kind == SweepKind::Gate
                              ? total_drive_energy_meV(options.vds_V, v, options.gate_alpha)
                              : 1000.0 * std::abs(v);
    report.assigned_states.push_back(
        {k, find_states_near(table, energy, options.assign_tol_meV)});
  }
  return report;
}

namespace {

std::string candidate_field(const std::vector<EnergyLevel>& levels) {
  std::string out;
  for (const auto& lvl : levels) {
    for (const auto& s : lvl.states) {
      if (!out.empty()) out += ';';
      out += fmt::format("{}:{}:{}", s.nx, s.ny, s.nz);
    }
  }
  return out;
}

}  // namespace

void write_report_csv(std::ostream& os, const PeakReport& report) {
  os << "peak_V,height_pA,candidate_states\n";
  for (std::size_t k = 0; k < report.peaks.size(); ++k) {
    const std::string states =
        k < report.assigned_states.size() ? candidate_field(report.assigned_states[k].candidates)
                                          : std::string{};
    fmt::print(os, "{:.10g},{:.10g},{}\n", report.peaks[k].voltage_V, report.peaks[k].height_pA,
               states);
  }
}

void write_report_summary(std::ostream& os, const PeakReport& report) {
  fmt::print(os, "peaks detected      : {}\n", report.peaks.size());
  if (report.analysis_floor_V) {
    fmt::print(os, "analysis floor      : |V| >= {:.4g} V\n", *report.analysis_floor_V);
  }
  if (!report.peaks.empty()) {
    fmt::print(os, "first peak          : {:.4g} V ({:.4g} pA)\n", report.peaks.front().voltage_V,
               report.peaks.front().height_pA);
  }
  if (report.median_spacing_V) {
    fmt::print(os, "median spacing      : {:.4g} V\n", *report.median_spacing_V);
    fmt::print(os, "E_c estimate        : {:.4g} meV\n", *report.ec_estimate_meV);
  } else {
    fmt::print(os, "E_c estimate        : n/a (fewer than 2 peaks)\n");
  }
  if (report.gate) {
    fmt::print(os, "alpha estimate      : {:.4g}\n", report.gate->alpha);
    fmt::print(os, "C_g estimate        : {:.4g} aF\n", report.gate->gate_capacitance_aF);
  }
  for (const auto& a : report.assigned_states) {
    std::string labels;
    for (const auto& lvl : a.candidates) {
      if (!labels.empty()) labels += ", ";
      labels += fmt::format("{} ({:.4g} meV)", lvl.label(), lvl.energy_meV);
    }
    fmt::print(os, "peak {:>3} @ {:>8.4g} V : {}\n", a.peak_index,
               report.peaks[a.peak_index].voltage_V, labels.empty() ? "-" : labels);
  }
}

}  // namespace nanoshuttle
