#pragma once

// INI-style device configuration:
//
//   [geometry]   length_nm width_nm height_nm
//   [junction]   area_nm2 thickness_nm permittivity resistance_ohm rc_capacitance_aF
//   [gate]       alpha capacitance_aF onset_V period_V
//   [mechanics]  spring_N_per_m stress_Pa density_kg_m3 volume_m3
//                tunnel_rate_per_s charge_density_per_cm3 noise_pA asymmetry
//   [transport]  peak_width_mV peak_current_pA charging_energy_meV
//                counter_current noise ladder
//
// Every key is optional. '#' and ';' start comments.

#include <filesystem>
#include <iosfwd>

#include "nanoshuttle/transport.hpp"

namespace nanoshuttle::cli {

/// Parses a config document. Unset gate alpha / C_g are derived from the
/// gate period and junction capacitance; an unset peak current is e / RC.
/// Throws InputError naming the line and key on any problem.
DeviceModel parse_device_config(std::istream& is);

DeviceModel load_device_config(const std::filesystem::path& path);

}  // namespace nanoshuttle::cli
