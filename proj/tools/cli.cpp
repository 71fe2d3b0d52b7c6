#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "config.hpp"
#include "nanoshuttle/analysis.hpp"
#include "nanoshuttle/constants.hpp"
#include "nanoshuttle/electrostatics.hpp"
#include "nanoshuttle/errors.hpp"
#include "nanoshuttle/mechanics.hpp"
#include "nanoshuttle/spectrum.hpp"
#include "nanoshuttle/transport.hpp"

namespace nanoshuttle::cli {

namespace {

constexpr double kReferenceDisplacement_nm = 0.3;
constexpr double kSubthresholdMarginSigmas = 3.0;

struct GlobalOptions {
  std::string config_path;
  std::string out_path;
};

DeviceModel load_model(const GlobalOptions& g) {
  if (g.config_path.empty()) return DeviceModel::defaults();
  return load_device_config(g.config_path);
}

// Writes `data` to --out (summary stays on `out`) or to `out` (summary to `err`).
struct Sinks {
  std::ostream* data = nullptr;
  std::ostream* summary = nullptr;
  std::unique_ptr<std::ofstream> file;
};

Sinks open_sinks(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  Sinks s;
  if (g.out_path.empty()) {
    s.data = &out;
    s.summary = &err;
    return s;
  }
  s.file = std::make_unique<std::ofstream>(g.out_path, std::ios::binary | std::ios::trunc);
  if (!*s.file) throw InputError(fmt::format("cannot write output file '{}'", g.out_path));
  s.data = s.file.get();
  s.summary = &out;
  return s;
}

void finish(Sinks& s, const GlobalOptions& g) {
  s.data->flush();
  if (s.file && !*s.file) throw InputError(fmt::format("failed writing '{}'", g.out_path));
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("NANOSHUTTLE_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::string_view text(raw);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError(fmt::format("NANOSHUTTLE_SEED must be an unsigned integer, got '{}'", text));
  }
  return value;
}

// ---------------------------------------------------------------------------

int cmd_spectrum(const GlobalOptions& g, double cutoff, std::ostream& out, std::ostream& err) {
  const DeviceModel model = load_model(g);
  if (!(cutoff > 0.0)) throw InputError("--cutoff must be positive");
  const StateTable table = enumerate_levels(model.geometry, cutoff);

  Sinks sinks = open_sinks(g, out, err);
  write_table_csv(*sinks.data, table);
  finish(sinks, g);

  std::ostream& sum = *sinks.summary;
  fmt::print(sum, "{} levels, {} states up to {:.4g} meV\n", table.levels().size(),
             table.state_count(), cutoff);
  const auto marks = landmark_states();
  const double top = state_energy(marks.back(), model.geometry);
  if (cutoff >= top) {
    fmt::print(sum, "landmark states:\n");
    for (const auto& s : marks) {
      const EnergyLevel* lvl = table.find(s);
      fmt::print(sum, "  {:<28} {:>9.4f} meV  N={}\n", lvl->label(), lvl->energy_meV,
                 occupation_number(s));
    }
  }
  return kOk;
}

struct SimulateOptions {
  std::string kind = "drain";
  double from = 0.0;
  double to = 1.0;
  double step = 1e-3;
  std::string direction;
  std::optional<std::uint64_t> seed;
  double vds = 0.05;
  std::optional<bool> noise;
};

int cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& out,
                 std::ostream& err) {
  DeviceModel model = load_model(g);
  if (o.noise) model.noise_enabled = *o.noise;

  SweepConfig sweep;
  sweep.v_start = o.from;
  sweep.v_end = o.to;
  sweep.step = o.step;
  sweep.kind = o.kind == "gate" ? SweepKind::Gate : SweepKind::Drain;
  if (o.direction.empty()) {
    sweep.direction = o.to >= o.from ? SweepDirection::Up : SweepDirection::Down;
  } else {
    sweep.direction = o.direction == "down" ? SweepDirection::Down : SweepDirection::Up;
  }
  sweep.seed = o.seed ? *o.seed : env_seed().value_or(0);
  sweep.validate();

  const IVTrace trace = sweep.kind == SweepKind::Gate ? simulate_gate_sweep(model, sweep, o.vds)
                                                      : simulate_drain_sweep(model, sweep);

  Sinks sinks = open_sinks(g, out, err);
  write_trace_csv(*sinks.data, trace);
  finish(sinks, g);

  std::ostream& sum = *sinks.summary;
  fmt::print(sum, "{} sweep, {} points, seed {}, noise {}\n", o.kind, trace.points.size(),
             sweep.seed, model.noise_enabled ? "on" : "off");
  if (const auto vt = trace.first_annotation(AnnotationLabel::Threshold)) {
    fmt::print(sum, "threshold           : {:.4g} V\n", *vt);
    if (sweep.kind == SweepKind::Gate) {
      const double e = total_drive_energy_meV(o.vds, *vt, model.gate.alpha);
      const StateTable table = enumerate_levels(model.geometry, e + 20.0);
      const auto near = find_states_near(table, e, 10.0);
      std::string labels;
      for (const auto& lvl : near) labels += (labels.empty() ? "" : ", ") + lvl.label();
      fmt::print(sum, "drive energy        : {:.4g} meV -> {}\n", e,
                 labels.empty() ? std::string("-") : labels);
    }
  } else {
    fmt::print(sum, "threshold           : not crossed\n");
  }

  AnalysisOptions ao;
  ao.kind = sweep.kind;
  ao.vds_V = o.vds;
  ao.gate_alpha = model.gate.alpha;
  const double sigma_V = model.peak_width_mV * 1e-3 /
                         (sweep.kind == SweepKind::Gate ? model.gate.alpha : 1.0);
  ao.subthreshold_margin_V = kSubthresholdMarginSigmas * sigma_V;
  std::span<const TracePoint> pts(trace.points);
  std::size_t peaks = 0;
  if (const auto vt = trace.first_annotation(AnnotationLabel::Threshold)) {
    const double floor_V = std::abs(*vt) - *ao.subthreshold_margin_V;
    std::vector<TracePoint> kept;
    for (const auto& p : pts) {
      if (std::abs(p.voltage_V) >= floor_V) kept.push_back(p);
    }
    peaks = detect_peaks(kept).size();
  } else {
    peaks = detect_peaks(pts).size();
  }
  fmt::print(sum, "peaks               : {}\n", peaks);
  for (const auto& a : trace.annotations) {
    fmt::print(sum, "event {:<18}: {:.4g} V\n", to_string(a.label), a.voltage_V);
  }
  return kOk;
}

struct AnalyzeOptions {
  std::string trace_path;
  std::string kind = "drain";
  double vds = 0.05;
  double tol = 5.0;
  double min_height = kDefaultMinHeight_pA;
  double min_prominence = kDefaultMinProminence_pA;
  bool no_floor = false;
};

int cmd_analyze(const GlobalOptions& g, const AnalyzeOptions& o, std::ostream& out,
                std::ostream& err) {
  const DeviceModel model = load_model(g);
  std::ifstream in(o.trace_path);
  if (!in) throw InputError(fmt::format("cannot open trace '{}'", o.trace_path));
  IVTrace trace;
  try {
    trace = read_trace_csv(in);
  } catch (const InputError& e) {
    throw InputError(fmt::format("{}: {}", o.trace_path, e.what()));
  }

  AnalysisOptions ao;
  ao.kind = o.kind == "gate" ? SweepKind::Gate : SweepKind::Drain;
  trace.sweep.kind = ao.kind;
  ao.min_height_pA = o.min_height;
  ao.min_prominence_pA = o.min_prominence;
  ao.assign_tol_meV = o.tol;
  ao.vds_V = o.vds;
  ao.gate_alpha = model.gate.alpha;
  ao.capacitance_aF = junction_capacitance_aF(model.junction);
  if (!o.no_floor) {
    const double sigma_V =
        model.peak_width_mV * 1e-3 / (ao.kind == SweepKind::Gate ? model.gate.alpha : 1.0);
    ao.subthreshold_margin_V = kSubthresholdMarginSigmas * sigma_V;
  }

  double max_energy = 1.0;
  for (const auto& p : trace.points) {
    const double e = ao.kind == SweepKind::Gate
                         ? total_drive_energy_meV(o.vds, p.voltage_V, model.gate.alpha)
                         : 1000.0 * std::abs(p.voltage_V);
    max_energy = std::max(max_energy, e);
  }
  const StateTable table = enumerate_levels(model.geometry, max_energy + o.tol + 1.0);
  const PeakReport report = analyze_trace(trace, table, ao);

  Sinks sinks = open_sinks(g, out, err);
  write_report_csv(*sinks.data, report);
  finish(sinks, g);

  std::ostream& sum = *sinks.summary;
  write_report_summary(sum, report);
  if (ao.kind == SweepKind::Drain && !report.peaks.empty()) {
    const auto near = assign_threshold_state(report.peaks.front().voltage_V, table, o.tol);
    fmt::print(sum, "threshold state     : {}\n", near.empty() ? "-" : near.front().label());
  }
  if (ao.kind == SweepKind::Gate) {
    if (const auto vt = trace.first_annotation(AnnotationLabel::Threshold)) {
      const double e = total_drive_energy_meV(o.vds, *vt, model.gate.alpha);
      std::string labels;
      for (const auto& lvl : find_states_near(table, e, o.tol)) {
        labels += (labels.empty() ? "" : ", ") + lvl.label();
      }
      fmt::print(sum, "onset drive energy  : {:.4g} meV -> {}\n", e,
                 labels.empty() ? std::string("-") : labels);
    }
  }
  return kOk;
}

int cmd_constants(const GlobalOptions& g, std::ostream& out) {
  const DeviceModel m = load_model(g);
  const auto line = [&out](std::string_view name, double value, std::string_view unit,
                           std::string_view formula) {
    const std::string lhs = fmt::format("{} = {:.4g}{}{}", name, value, unit.empty() ? "" : " ", unit);
    fmt::print(out, "  {:<34} [{}]\n", lhs, formula);
  };

  const double c = junction_capacitance_aF(m.junction);
  const double ec = charging_energy_meV(c);
  out << "Electrostatics\n";
  line("C", c, "aF", "eps_r eps_0 A / D");
  line("E_c", ec, "meV", "e^2 / 2C");
  line("peak spacing", m.charging_energy_meV, "mV", "configured E_c / e");
  try {
    const GateCoupling gc = gate_alpha_from_period(m.gate.period_V, c);
    line("alpha", gc.alpha, "", fmt::format("sqrt(e / (dV_gs C)), dV_gs = {:.4g} V", m.gate.period_V));
    line("C_g", gc.gate_capacitance_aF, "aF", "alpha C");
  } catch (const std::domain_error&) {
    fmt::print(out, "  alpha = n/a                        [period too short: alpha >= 1]\n");
  }
  const RcLimit rc = rc_limited_current(m.junction.resistance_ohm,
                                        m.junction.rc_capacitance_aF * constants::kAttofarad);
  line("tau", rc.tau_s, "s", "R C");
  line("I_peak", rc.peak_current_A / constants::kPicoampere, "pA", "e / RC");

  out << "Mechanics\n";
  const MechanicalParams& mp = m.mech;
  const double area = m.junction.face_area_nm2;
  line("K", mp.spring_N_per_m, "N/m", "configured spring constant");
  line("K(sigma)", spring_constant(mp.stress_Pa, area), "N/m", "sigma A, calibrated");
  const double dx = displacement_from_noise_nm(mp.noise_amplitude_pA, area,
                                               mp.charge_density_per_cm3, mp.tunnel_rate_per_s);
  const double dx3 =
      displacement_from_noise_nm(mp.noise_amplitude_pA, area, mp.charge_density_per_cm3,
                                 mp.tunnel_rate_per_s, AffectedVolume::Third);
  line("dX", dx, "nm", "dI / (e A n_e Gamma)");
  line("dX(/3)", dx3, "nm", "3 dI / (e A n_e Gamma)");
  line("W(0.3 nm)", mechanical_work_meV(mp.spring_N_per_m, kReferenceDisplacement_nm), "meV",
       "K dX^2 / 2");
  line("W(dX)", mechanical_work_meV(mp.spring_N_per_m, dx), "meV", "K dX^2 / 2");
  line("W(dX/3)", mechanical_work_meV(mp.spring_N_per_m, dx3), "meV", "K dX^2 / 2");
  const OscillatorFrequencies f =
      oscillator_frequencies(mp.spring_N_per_m, mp.density_kg_m3, mp.box_volume_m3);
  line("omega0", f.omega0_per_s, "1/s", "sqrt(K / rho V)");
  line("omega_net", f.omega_net_per_s, "1/s", "59 omega0");

  out << "Coupling\n";
  const double upper = state_energy(landmarks::kForwardThreshold, m.geometry);
  const double lower = state_energy(landmarks::kCounterCurrentEnd, m.geometry);
  const double gap = upper - lower;
  line("dE_n", gap, "meV", "E[3,2,2] - E[2,2,2]");
  for (const auto& [label, e] : {std::pair<std::string_view, double>{"spacing", m.charging_energy_meV},
                                 std::pair<std::string_view, double>{"e^2/2C", ec}}) {
    try {
      const CouplingEstimate ce = coupling_lambda(e, gap);
      line(fmt::format("dE_e({})", label), ce.gap_split_meV, "meV", fmt::format("E_c - dE_n, E_c = {:.4g} meV", e));
      line(fmt::format("lambda({})", label), ce.lambda, "", "dE_e / dE_n");
    } catch (const std::domain_error&) {
      fmt::print(out, "  lambda({}) = n/a                  [E_c <= dE_n]\n", label);
    }
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-electron pillar-box simulator and trace analyzer", "nanoshuttle"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Device config file (INI)");
  app.add_option("--out", g.out_path, "Output file (CSV); stdout when omitted");

  double cutoff = 950.0;
  auto* spectrum = app.add_subcommand("spectrum", "Enumerate box levels to CSV");
  spectrum->add_option("--cutoff", cutoff, "Energy cutoff in meV")->capture_default_str();

  SimulateOptions sim;
  std::uint64_t seed_value = 0;
  bool noise_value = true;
  auto* simulate = app.add_subcommand("simulate", "Synthesize an I-V trace");
  simulate->add_option("--kind", sim.kind, "drain or gate")
      ->check(CLI::IsMember({"drain", "gate"}))
      ->capture_default_str();
  simulate->add_option("--from", sim.from, "Start voltage (V)")->capture_default_str();
  simulate->add_option("--to", sim.to, "End voltage (V)")->capture_default_str();
  simulate->add_option("--step", sim.step, "Voltage step (V)")->capture_default_str();
  simulate->add_option("--direction", sim.direction, "up or down (inferred if omitted)")
      ->check(CLI::IsMember({"up", "down"}));
  auto* seed_opt = simulate->add_option("--seed", seed_value, "Noise seed (else NANOSHUTTLE_SEED)");
  simulate->add_option("--vds", sim.vds, "Drain bias for gate sweeps (V)")->capture_default_str();
  auto* noise_opt = simulate->add_flag("--noise,!--no-noise", noise_value,
                                       "Override the config's noise switch");

  AnalyzeOptions ana;
  auto* analyze = app.add_subcommand("analyze", "Extract peaks and parameters from a trace CSV");
  analyze->add_option("trace", ana.trace_path, "Trace CSV")->required();
  analyze->add_option("--kind", ana.kind, "drain or gate")
      ->check(CLI::IsMember({"drain", "gate"}))
      ->capture_default_str();
  analyze->add_option("--vds", ana.vds, "Drain bias of a gate trace (V)")->capture_default_str();
  analyze->add_option("--tol", ana.tol, "State assignment tolerance (meV)")->capture_default_str();
  analyze->add_option("--min-height", ana.min_height, "Peak height threshold (pA)")
      ->capture_default_str();
  analyze->add_option("--min-prominence", ana.min_prominence, "Peak prominence threshold (pA)")
      ->capture_default_str();
  analyze->add_flag("--no-floor", ana.no_floor, "Do not skip the sub-threshold region");

  auto* constants_cmd = app.add_subcommand("constants", "Print the derived-parameter panel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUserError;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(g, cutoff, out, err);
    if (simulate->parsed()) {
      if (seed_opt->count() > 0) sim.seed = seed_value;
      if (noise_opt->count() > 0) sim.noise = noise_value;
      try {
        return cmd_simulate(g, sim, out, err);
      } catch (const InputError& e) {
        err << "error: " << e.what() << "\n\n" << simulate->help();
        return kUserError;
      }
    }
    if (analyze->parsed()) return cmd_analyze(g, ana, out, err);
    if (constants_cmd->parsed()) return cmd_constants(g, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const CutoffError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace nanoshuttle::cli
