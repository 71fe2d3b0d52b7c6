#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "nanoshuttle/constants.hpp"
#include "nanoshuttle/errors.hpp"

namespace nanoshuttle::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

double to_number(std::string_view v, std::size_t line, std::string_view key) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw InputError(fmt::format("line {}: '{}' expects a number, got '{}'", line, key, v));
  }
  return out;
}

bool to_bool(std::string_view v, std::size_t line, std::string_view key) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw InputError(fmt::format("line {}: '{}' expects true/false, got '{}'", line, key, v));
}

struct Pending {
  std::optional<double> alpha;
  std::optional<double> gate_capacitance;
  std::optional<double> peak_current;
};

using Setter = std::function<void(DeviceModel&, Pending&, std::string_view, std::size_t)>;

template <typename Section>
Setter field(Section DeviceModel::*section, double Section::*member, const char* key) {
  return [=](DeviceModel& m, Pending&, std::string_view v, std::size_t line) {
    (m.*section).*member = to_number(v, line, key);
  };
}

Setter model_number(double DeviceModel::*member, const char* key) {
  return [=](DeviceModel& m, Pending&, std::string_view v, std::size_t line) {
    m.*member = to_number(v, line, key);
  };
}

Setter model_flag(bool DeviceModel::*member, const char* key) {
  return [=](DeviceModel& m, Pending&, std::string_view v, std::size_t line) {
    m.*member = to_bool(v, line, key);
  };
}

Setter pending(std::optional<double> Pending::*member, const char* key) {
  return [=](DeviceModel&, Pending& p, std::string_view v, std::size_t line) {
    p.*member = to_number(v, line, key);
  };
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  using M = DeviceModel;
  static const std::map<std::string, std::map<std::string, Setter>> kSchema{
      {"geometry",
       {
           {"length_nm", field(&M::geometry, &BoxGeometry::length_nm, "length_nm")},
           {"width_nm", field(&M::geometry, &BoxGeometry::width_nm, "width_nm")},
           {"height_nm", field(&M::geometry, &BoxGeometry::height_nm, "height_nm")},
       }},
      {"junction",
       {
           {"area_nm2", field(&M::junction, &JunctionParams::face_area_nm2, "area_nm2")},
           {"thickness_nm",
            field(&M::junction, &JunctionParams::barrier_thickness_nm, "thickness_nm")},
           {"permittivity",
            field(&M::junction, &JunctionParams::relative_permittivity, "permittivity")},
           {"resistance_ohm",
            field(&M::junction, &JunctionParams::resistance_ohm, "resistance_ohm")},
           {"rc_capacitance_aF",
            field(&M::junction, &JunctionParams::rc_capacitance_aF, "rc_capacitance_aF")},
       }},
      {"gate",
       {
           {"alpha", pending(&Pending::alpha, "alpha")},
           {"capacitance_aF", pending(&Pending::gate_capacitance, "capacitance_aF")},
           {"onset_V", field(&M::gate, &GateParams::onset_V, "onset_V")},
           {"period_V", field(&M::gate, &GateParams::period_V, "period_V")},
       }},
      {"mechanics",
       {
           {"spring_N_per_m",
            field(&M::mech, &MechanicalParams::spring_N_per_m, "spring_N_per_m")},
           {"stress_Pa", field(&M::mech, &MechanicalParams::stress_Pa, "stress_Pa")},
           {"density_kg_m3",
            field(&M::mech, &MechanicalParams::density_kg_m3, "density_kg_m3")},
           {"volume_m3", field(&M::mech, &MechanicalParams::box_volume_m3, "volume_m3")},
           {"tunnel_rate_per_s",
            field(&M::mech, &MechanicalParams::tunnel_rate_per_s, "tunnel_rate_per_s")},
           {"charge_density_per_cm3",
            field(&M::mech, &MechanicalParams::charge_density_per_cm3,
                  "charge_density_per_cm3")},
           {"noise_pA", field(&M::mech, &MechanicalParams::noise_amplitude_pA, "noise_pA")},
           {"asymmetry", field(&M::mech, &MechanicalParams::asymmetry, "asymmetry")},
       }},
      {"transport",
       {
           {"peak_width_mV", model_number(&M::peak_width_mV, "peak_width_mV")},
           {"peak_current_pA", pending(&Pending::peak_current, "peak_current_pA")},
           {"charging_energy_meV", model_number(&M::charging_energy_meV, "charging_energy_meV")},
           {"counter_current", model_flag(&M::counter_current_enabled, "counter_current")},
           {"noise", model_flag(&M::noise_enabled, "noise")},
           {"ladder",
            [](DeviceModel& m, Pending&, std::string_view v, std::size_t line) {
              if (v == "charging") {
                m.ladder = PeakLadder::Charging;
              } else if (v == "quantum") {
                m.ladder = PeakLadder::Quantum;
              } else {
                throw InputError(fmt::format(
                    "line {}: 'ladder' expects charging or quantum, got '{}'", line, v));
              }
            }},
       }},
  };
  return kSchema;
}

}  // namespace

DeviceModel parse_device_config(std::istream& is) {
  DeviceModel model = DeviceModel::defaults();
  Pending pend;
  std::string section;
  std::set<std::string> seen;

  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto c = text.find_first_of("#;"); c != std::string_view::npos) {
      text = text.substr(0, c);
    }
    text = trim(text);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']') throw InputError(fmt::format("line {}: malformed section", line));
      section = std::string(trim(text.substr(1, text.size() - 2)));
      if (!schema().contains(section)) {
        throw InputError(fmt::format("line {}: unknown section [{}]", line, section));
      }
      continue;
    }

    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(fmt::format("line {}: expected 'key = value'", line));
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    if (section.empty()) {
      throw InputError(fmt::format("line {}: key '{}' appears before any section", line, key));
    }
    const auto& keys = schema().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) {
      throw InputError(fmt::format("line {}: unknown key '{}' in [{}]", line, key, section));
    }
    if (!seen.insert(section + "." + key).second) {
      throw InputError(fmt::format("line {}: duplicate key '{}' in [{}]", line, key, section));
    }
    if (value.empty()) throw InputError(fmt::format("line {}: '{}' has no value", line, key));
    it->second(model, pend, value, line);
  }

  try {
    model.junction.validate();
    const double c = junction_capacitance_aF(model.junction);
    if (pend.alpha) {
      model.gate.alpha = *pend.alpha;
      model.gate.gate_capacitance_aF = pend.gate_capacitance.value_or(*pend.alpha * c);
    } else {
      const GateCoupling g = gate_alpha_from_period(model.gate.period_V, c);
      model.gate.alpha = g.alpha;
      model.gate.gate_capacitance_aF = pend.gate_capacitance.value_or(g.gate_capacitance_aF);
    }
    if (pend.peak_current) {
      model.peak_current_pA = *pend.peak_current;
    } else {
      const RcLimit rc = rc_limited_current(
          model.junction.resistance_ohm, model.junction.rc_capacitance_aF * constants::kAttofarad);
      model.peak_current_pA = rc.peak_current_A / constants::kPicoampere;
    }
    model.validate();
  } catch (const std::logic_error& e) {  // invalid_argument, domain_error
    throw InputError(fmt::format("invalid configuration: {}", e.what()));
  }
  return model;
}

DeviceModel load_device_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open config file '{}'", path.string()));
  try {
    return parse_device_config(in);
  } catch (const InputError& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace nanoshuttle::cli
