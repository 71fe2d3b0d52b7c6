#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "nanoshuttle/analysis.hpp"
#include "nanoshuttle/errors.hpp"
#include "nanoshuttle/transport.hpp"

using namespace nanoshuttle;

namespace {

SweepConfig drain(double from, double to, SweepDirection dir, std::uint64_t seed = 0) {
  SweepConfig s;
  s.v_start = from;
  s.v_end = to;
  s.direction = dir;
  s.seed = seed;
  return s;
}

DeviceModel quiet() {
  DeviceModel m = DeviceModel::defaults();
  m.noise_enabled = false;
  return m;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// Millivolt index of a grid voltage.
long mv(double v) { return std::lround(v * 1000.0); }

}  // namespace

TEST_CASE("default model") {
  const DeviceModel m = DeviceModel::defaults();
  CHECK(m.peak_current_pA == doctest::Approx(1.602176634).epsilon(1e-12));
  CHECK(m.gate.alpha == doctest::Approx(0.38077948).epsilon(1e-7));
  CHECK(m.gate.gate_capacitance_aF == doctest::Approx(0.84152467).epsilon(1e-7));
  CHECK(m.peak_width_mV == 5.0);
  CHECK(m.charging_energy_meV == 35.0);
  CHECK_NOTHROW(m.validate());
}

TEST_CASE("sweep validation") {
  CHECK_THROWS_AS(drain(1.0, 0.0, SweepDirection::Up).validate(), InputError);
  CHECK_THROWS_AS(drain(0.0, 1.0, SweepDirection::Down).validate(), InputError);
  SweepConfig s = drain(0.0, 1.0, SweepDirection::Up);
  s.step = 0.0;
  CHECK_THROWS_AS(s.validate(), InputError);
  s.step = -1e-3;
  CHECK_THROWS_AS(simulate_drain_sweep(quiet(), s), InputError);
}

TEST_CASE("sweep voltages") {
  const auto up = sweep_voltages(drain(0.0, 1.0, SweepDirection::Up));
  REQUIRE(up.size() == 1001);
  CHECK(up.front() == 0.0);
  CHECK(up.back() == doctest::Approx(1.0));
  auto down = sweep_voltages(drain(1.0, 0.0, SweepDirection::Down));
  std::reverse(down.begin(), down.end());
  CHECK(down == up);

  const auto rev = sweep_voltages(drain(0.0, -0.5, SweepDirection::Down));
  REQUIRE(rev.size() == 501);
  CHECK(rev.front() == 0.0);
  CHECK(rev.back() == doctest::Approx(-0.5));

  CHECK(sweep_voltages(drain(0.3, 0.3, SweepDirection::Up)).empty());
}

TEST_CASE("zero-length sweeps give empty traces") {
  CHECK(simulate_drain_sweep(quiet(), drain(0.5, 0.5, SweepDirection::Up)).points.empty());
  SweepConfig g = drain(1.0, 1.0, SweepDirection::Up);
  g.kind = SweepKind::Gate;
  CHECK(simulate_gate_sweep(quiet(), g, 0.05).points.empty());
}

TEST_CASE("sweep kind must match the simulator") {
  SweepConfig g = drain(0.0, 1.0, SweepDirection::Up);
  g.kind = SweepKind::Gate;
  CHECK_THROWS_AS(simulate_drain_sweep(quiet(), g), InputError);
  CHECK_THROWS_AS(simulate_gate_sweep(quiet(), drain(0.0, 1.0, SweepDirection::Up), 0.05),
                  InputError);
}

TEST_CASE("forward peak ladder") {
  const DeviceModel m = quiet();
  const auto e = forward_peak_energies(m, 1000.0);
  REQUIRE(e.size() == 22);
  CHECK(e.front() == doctest::Approx(243.505644));
  CHECK(e[1] - e[0] == doctest::Approx(35.0));
  CHECK_THROWS_AS(forward_peak_energies(m, 200.0), std::invalid_argument);

  DeviceModel q = m;
  q.ladder = PeakLadder::Quantum;
  const auto levels = forward_peak_energies(q, 300.0);
  REQUIRE_FALSE(levels.empty());
  CHECK(levels.front() == doctest::Approx(243.505644));
  CHECK(std::is_sorted(levels.begin(), levels.end()));
}

TEST_CASE("forward up-sweep: threshold peak and staircase") {
  const IVTrace t = simulate_drain_sweep(quiet(), drain(0.0, 1.0, SweepDirection::Up));
  REQUIRE(t.points.size() == 1001);
  const auto vt = t.first_annotation(AnnotationLabel::Threshold);
  REQUIRE(vt);
  CHECK(mv(*vt) == 244);
  const auto v2e = t.first_annotation(AnnotationLabel::Mode2e);
  REQUIRE(v2e);
  CHECK(mv(*v2e) == 910);
  CHECK_FALSE(t.first_annotation(AnnotationLabel::Mode1e));

  const auto at = [&](long m) { return t.points[static_cast<std::size_t>(m)].current_pA; };
  CHECK(at(244) == doctest::Approx(1.602176634 * std::exp(-0.5 * std::pow(0.494356 / 5.0, 2)))
                       .epsilon(1e-6));
  // 243.5 + 20 * 35 = 943.5 meV sits above the staircase; 208.5 steps below is 1e.
  CHECK(at(944) == doctest::Approx(2.0 * at(244)).epsilon(1e-9));
  for (const auto& p : t.points) CHECK(p.current_pA >= 0.0);
}

TEST_CASE("hysteresis_step thresholds") {
  const StateTable table = enumerate_levels(BoxGeometry{}, 950.0);
  using enum PumpMode;
  CHECK(hysteresis_step(SingleE, SweepDirection::Up, 909.0, table) == SingleE);
  CHECK(hysteresis_step(SingleE, SweepDirection::Up, 909.4, table) == DoubleE);
  CHECK(hysteresis_step(DoubleE, SweepDirection::Up, 100.0, table) == DoubleE);
  CHECK(hysteresis_step(DoubleE, SweepDirection::Down, 857.0, table) == DoubleE);
  CHECK(hysteresis_step(DoubleE, SweepDirection::Down, 856.5, table) == SingleE);
  CHECK(hysteresis_step(SingleE, SweepDirection::Down, 950.0, table) == SingleE);
  const StateTable small = enumerate_levels(BoxGeometry{}, 500.0);
  CHECK_THROWS_AS(hysteresis_step(SingleE, SweepDirection::Up, 400.0, small), CutoffError);
}

TEST_CASE("down-sweep holds 2e down to the [4,4,4] level") {
  const DeviceModel m = quiet();
  const IVTrace up = simulate_drain_sweep(m, drain(0.0, 1.0, SweepDirection::Up));
  const IVTrace down = simulate_drain_sweep(m, drain(1.0, 0.0, SweepDirection::Down));
  const auto v1e = down.first_annotation(AnnotationLabel::Mode1e);
  REQUIRE(v1e);
  CHECK(mv(*v1e) == 856);

  REQUIRE(up.points.size() == down.points.size());
  const std::size_t n = up.points.size();
  for (std::size_t k = 0; k < n; ++k) {
    const TracePoint& u = up.points[k];
    const TracePoint& d = down.points[n - 1 - k];
    REQUIRE(bit_equal(u.voltage_V, d.voltage_V));
    const double e = u.drive_energy_meV;
    if (e >= 856.7 && e <= 909.6) {
      CHECK(d.current_pA == doctest::Approx(2.0 * u.current_pA).epsilon(1e-12));
    } else {
      CHECK(bit_equal(d.current_pA, u.current_pA));
    }
  }
}

TEST_CASE("initial mode override") {
  SweepConfig s = drain(1.0, 0.95, SweepDirection::Down);
  s.initial_mode = PumpMode::SingleE;
  const IVTrace t = simulate_drain_sweep(quiet(), s);
  const IVTrace dflt = simulate_drain_sweep(quiet(), drain(1.0, 0.95, SweepDirection::Down));
  CHECK(t.points.front().current_pA ==
        doctest::Approx(0.5 * dflt.points.front().current_pA).epsilon(1e-12));
}

TEST_CASE("counter-current dip is optional and confined") {
  DeviceModel m = quiet();
  m.counter_current_enabled = true;
  const IVTrace t = simulate_drain_sweep(m, drain(0.0, 0.3, SweepDirection::Up));
  double minimum = 0.0;
  for (const auto& p : t.points) {
    if (p.current_pA < 0.0) {
      CHECK(p.drive_energy_meV >= 196.5);
      CHECK(p.drive_energy_meV <= 214.2);
    }
    minimum = std::min(minimum, p.current_pA);
  }
  CHECK(minimum < -1.0);
  const IVTrace off = simulate_drain_sweep(quiet(), drain(0.0, 0.3, SweepDirection::Up));
  for (const auto& p : off.points) CHECK(p.current_pA >= 0.0);
}

TEST_CASE("reverse charging sequence") {
  const auto seq = reverse_charging_sequence();
  const QuantumState expected[] = {{3, 2, 1}, {4, 2, 1}, {4, 3, 1}, {5, 2, 1},
                                   {4, 4, 1}, {6, 1, 1}, {6, 2, 1}, {6, 3, 1}};
  REQUIRE(seq.size() == 8);
  CHECK(std::equal(seq.begin(), seq.end(), std::begin(expected)));

  const ReverseSchedule s = reverse_peak_energies(quiet());
  REQUIRE(s.peaks.size() == 8);
  CHECK(s.peaks[0].energy_meV == doctest::Approx(118.162256));
  CHECK(s.peaks[7].energy_meV == doctest::Approx(306.177337));
  CHECK(s.interference_onset_meV == doctest::Approx(159.290555));
  CHECK(s.satellite_onset_meV == doctest::Approx(229.796210));
  CHECK(s.closure_meV == doctest::Approx(355.139598));
  CHECK(s.reopening_meV == doctest::Approx(408.018840));
}

TEST_CASE("channel phase is monotone in energy") {
  const ReverseSchedule s = reverse_peak_energies(quiet());
  CHECK(channel_phase(s, 100.0) == ChannelPhase::Open);
  CHECK(channel_phase(s, 200.0) == ChannelPhase::Interfering);
  CHECK(channel_phase(s, 355.139598) == ChannelPhase::Interfering);
  CHECK(channel_phase(s, 380.0) == ChannelPhase::Closed);
  CHECK(channel_phase(s, std::nextafter(s.reopening_meV, 0.0)) == ChannelPhase::Closed);
  CHECK(channel_phase(s, s.reopening_meV) == ChannelPhase::Reopened);
  CHECK(channel_phase(s, 408.1) == ChannelPhase::Reopened);
  int last = 0;
  for (double e = 0.0; e < 1000.0; e += 0.25) {
    const int p = static_cast<int>(channel_phase(s, e));
    CHECK(p >= last);
    last = p;
  }
}

TEST_CASE("interference modulation") {
  CHECK(interference_modulation({3, 3, 1}) == 1.0);
  CHECK(interference_modulation({4, 2, 1}) == doctest::Approx(0.5));
  CHECK(interference_modulation({6, 1, 1}) == doctest::Approx(1.0 / 3.5));
}

TEST_CASE("reverse sweep closes, then reopens") {
  const IVTrace t = simulate_drain_sweep(quiet(), drain(0.0, -0.6, SweepDirection::Down));
  double in_closed = 0.0;
  std::vector<TracePoint> reopened;
  for (const auto& p : t.points) {
    if (p.drive_energy_meV > 355.2 && p.drive_energy_meV < 408.1) {
      CHECK(p.current_pA == 0.0);
      in_closed += 1.0;
    }
    if (p.drive_energy_meV >= 408.1) reopened.push_back(p);
    CHECK(p.current_pA >= 0.0);
  }
  CHECK(in_closed == 53.0);
  std::reverse(reopened.begin(), reopened.end());
  CHECK_FALSE(detect_peaks(reopened).empty());

  CHECK(t.first_annotation(AnnotationLabel::PhaseInterfering));
  CHECK(t.first_annotation(AnnotationLabel::SatelliteOnset));
  const auto closed = t.first_annotation(AnnotationLabel::PhaseClosed);
  const auto reopen = t.first_annotation(AnnotationLabel::PhaseReopened);
  REQUIRE(closed);
  REQUIRE(reopen);
  CHECK(mv(*closed) == -356);
  CHECK(mv(*reopen) == -409);
  const auto vt = t.first_annotation(AnnotationLabel::Threshold);
  REQUIRE(vt);
  CHECK(mv(*vt) == -119);
}

TEST_CASE("reverse peak heights fall toward closure") {
  const IVTrace t = simulate_drain_sweep(quiet(), drain(0.0, -0.36, SweepDirection::Down));
  const auto height = [&](long m) { return t.points[static_cast<std::size_t>(m)].current_pA; };
  const double first = height(118);
  CHECK(first == doctest::Approx(1.602176634).epsilon(0.01));
  // [4,4,2]: 10% envelope, balanced state.
  CHECK(height(355) == doctest::Approx(0.1 * 1.602176634).epsilon(0.01));
}

TEST_CASE("sub-threshold noise is seeded and confined") {
  const DeviceModel m = DeviceModel::defaults();
  const IVTrace a = simulate_drain_sweep(m, drain(0.0, 1.0, SweepDirection::Up, 11));
  const IVTrace b = simulate_drain_sweep(m, drain(0.0, 1.0, SweepDirection::Up, 11));
  const IVTrace c = simulate_drain_sweep(m, drain(0.0, 1.0, SweepDirection::Up, 12));
  const IVTrace clean = simulate_drain_sweep(quiet(), drain(0.0, 1.0, SweepDirection::Up, 11));
  REQUIRE(a.points.size() == b.points.size());
  bool differs = false;
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    CHECK(bit_equal(a.points[k].current_pA, b.points[k].current_pA));
    differs = differs || a.points[k].current_pA != c.points[k].current_pA;
    if (a.points[k].drive_energy_meV >= 243.505644 - 20.0) {
      CHECK(bit_equal(a.points[k].current_pA, clean.points[k].current_pA));
    }
  }
  CHECK(differs);
  CHECK(a.points[0].current_pA > 0.0);
  CHECK(a.points[1].current_pA < 0.0);
}

TEST_CASE("equal-seed up and down sweeps share the noise realization") {
  const DeviceModel m = DeviceModel::defaults();
  const IVTrace up = simulate_drain_sweep(m, drain(0.0, 1.0, SweepDirection::Up, 5));
  const IVTrace down = simulate_drain_sweep(m, drain(1.0, 0.0, SweepDirection::Down, 5));
  const std::size_t n = up.points.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double e = up.points[k].drive_energy_meV;
    if (e < 856.7 || e > 909.6) {
      CHECK(bit_equal(up.points[k].current_pA, down.points[n - 1 - k].current_pA));
    }
  }
}

TEST_CASE("gate sweep peaks at onset + k * period") {
  SweepConfig s = drain(0.0, 3.0, SweepDirection::Up);
  s.kind = SweepKind::Gate;
  const DeviceModel m = quiet();
  const IVTrace t = simulate_gate_sweep(m, s, 0.05);
  const auto peaks = detect_peaks(t);
  REQUIRE(peaks.size() == 4);
  CHECK(mv(peaks[0].voltage_V) == 1000);
  CHECK(mv(peaks[1].voltage_V) == 1500);
  CHECK(mv(peaks[2].voltage_V) == 2000);
  const auto vt = t.first_annotation(AnnotationLabel::Threshold);
  REQUIRE(vt);
  CHECK(mv(*vt) == 1000);
  const TracePoint& onset = t.points[1000];
  CHECK(onset.drive_energy_meV == doctest::Approx(total_drive_energy_meV(0.05, 1.0, m.gate.alpha)));

  DeviceModel rounded = m;
  rounded.gate.alpha = 0.37;
  const IVTrace q = simulate_gate_sweep(rounded, s, 0.05);
  CHECK(q.points[1000].drive_energy_meV == doctest::Approx(420.0));
  const StateTable table = enumerate_levels(BoxGeometry{}, 950.0);
  CHECK(find_states_near(table, q.points[1000].drive_energy_meV, 10.0).front().label() ==
        "[2,2,3]");
  const auto near = find_states_near(table, onset.drive_energy_meV, 10.0);
  CHECK(std::any_of(near.begin(), near.end(),
                    [](const EnergyLevel& l) { return l.contains({2, 2, 3}); }));
}

TEST_CASE("annotation vocabulary round trips") {
  for (auto l : {AnnotationLabel::Threshold, AnnotationLabel::Mode2e, AnnotationLabel::Mode1e,
                 AnnotationLabel::PhaseInterfering, AnnotationLabel::PhaseClosed,
                 AnnotationLabel::PhaseReopened, AnnotationLabel::SatelliteOnset}) {
    CHECK(parse_annotation_label(to_string(l)) == l);
  }
  CHECK_FALSE(parse_annotation_label("threshold"));
  CHECK(to_string(AnnotationLabel::Mode2e) == "MODE_2E");
}

TEST_CASE("trace CSV round trip") {
  const IVTrace t = simulate_drain_sweep(DeviceModel::defaults(),
                                         drain(0.0, 1.0, SweepDirection::Up, 3));
  std::ostringstream os;
  write_trace_csv(os, t);
  CHECK(os.str().rfind("voltage_V,current_pA,annotation\n", 0) == 0);
  CHECK(os.str().find("0.244,") != std::string::npos);
  CHECK(os.str().find(",THRESHOLD\n") != std::string::npos);
  std::istringstream in(os.str());
  const IVTrace back = read_trace_csv(in);
  REQUIRE(back.points.size() == t.points.size());
  for (std::size_t k = 0; k < t.points.size(); ++k) {
    CHECK(back.points[k].voltage_V == doctest::Approx(t.points[k].voltage_V).epsilon(1e-9));
    CHECK(back.points[k].current_pA == doctest::Approx(t.points[k].current_pA).epsilon(1e-9));
  }
  REQUIRE(back.annotations.size() == t.annotations.size());
  for (std::size_t k = 0; k < t.annotations.size(); ++k) {
    CHECK(back.annotations[k].label == t.annotations[k].label);
  }
}

TEST_CASE("trace CSV rejects malformed input") {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_trace_csv(in);
  };
  CHECK_THROWS_AS(parse(""), InputError);
  CHECK_THROWS_AS(parse("v,i,a\n0,1,\n"), InputError);
  CHECK_THROWS_AS(parse("voltage_V,current_pA,annotation\n0,1,\n0.001\n"), InputError);
  CHECK_THROWS_AS(parse("voltage_V,current_pA,annotation\n0,abc,\n"), InputError);
  CHECK_THROWS_AS(parse("voltage_V,current_pA,annotation\n0,1,BOGUS\n"), InputError);
  CHECK_THROWS_AS(parse("voltage_V,current_pA,annotation\n0,1,\n0,2,\n"), InputError);
  try {
    parse("voltage_V,current_pA,annotation\n0,1,\n0.001,2\n");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(parse("voltage_V,current_pA,annotation\n").points.empty());
  CHECK(parse("voltage_V,current_pA,annotation\n0,1,MODE_2E;THRESHOLD\n").annotations.size() == 2);
}
