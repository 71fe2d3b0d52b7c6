#include "nanoshuttle/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nanoshuttle/constants.hpp"
#include "nanoshuttle/errors.hpp"

namespace nanoshuttle {

void BoxGeometry::validate() const {
  if (!(length_nm > 0.0) || !(width_nm > 0.0) || !(height_nm > 0.0)) {
    throw std::invalid_argument(fmt::format(
        "box dimensions must be positive (got {} x {} x {} nm)", length_nm, width_nm,
        height_nm));
  }
}

double state_energy(QuantumState state, const BoxGeometry& geom) {
  const auto axis = [](int n, double dim) {
    const double q = static_cast<double>(n) / dim;
    return q * q;
  };
  // (x + y) + z: swapping nx/ny with L == W is bitwise symmetric.
  const double sum = (axis(state.nx, geom.length_nm) + axis(state.ny, geom.width_nm)) +
                     axis(state.nz, geom.height_nm);
  return constants::kConfinementMevNm2 * sum;
}

std::string format_state(QuantumState s) {
  return fmt::format("[{},{},{}]", s.nx, s.ny, s.nz);
}

bool EnergyLevel::contains(QuantumState s) const {
  return std::binary_search(states.begin(), states.end(), s);
}

std::optional<int> EnergyLevel::occupation() const {
  if (states.empty()) return std::nullopt;
  const int n = occupation_number(states.front());
  for (const auto& s : states) {
    if (occupation_number(s) != n) return std::nullopt;
  }
  return n;
}

std::string EnergyLevel::label() const {
  std::string out;
  for (const auto& s : states) {
    if (!out.empty()) out += '/';
    out += format_state(s);
  }
  return out;
}

StateTable::StateTable(BoxGeometry geom, double cutoff_meV, std::vector<EnergyLevel> levels)
    : geometry_(geom), cutoff_meV_(cutoff_meV), levels_(std::move(levels)) {}

std::size_t StateTable::state_count() const {
  std::size_t n = 0;
  for (const auto& lvl : levels_) n += lvl.degeneracy();
  return n;
}

const EnergyLevel* StateTable::find(QuantumState s) const {
  const double e = state_energy(s, geometry_);
  if (e > cutoff_meV_) return nullptr;
  auto it = std::lower_bound(
      levels_.begin(), levels_.end(), e - 2.0 * kDegeneracyTolerance_meV,
      [](const EnergyLevel& lvl, double v) { return lvl.energy_meV < v; });
  for (; it != levels_.end() && it->energy_meV <= e + 2.0 * kDegeneracyTolerance_meV; ++it) {
    if (it->contains(s)) return &*it;
  }
  return nullptr;
}

double StateTable::energy_of(QuantumState s) const {
  const EnergyLevel* lvl = find(s);
  if (lvl == nullptr) {
    throw CutoffError(fmt::format("state {} lies above the table cutoff of {} meV",
                                  format_state(s), cutoff_meV_));
  }
  return lvl->energy_meV;
}

int axis_bound(double dimension_nm, double cutoff_meV) {
  if (cutoff_meV <= 0.0) return 0;
  return static_cast<int>(
             std::ceil(dimension_nm * std::sqrt(cutoff_meV / constants::kConfinementMevNm2))) +
         1;
}

StateTable enumerate_levels(const BoxGeometry& geom, double cutoff_meV) {
  geom.validate();
  if (!(cutoff_meV > 0.0)) {
    throw std::invalid_argument("cutoff must be positive");
  }

  struct Entry {
    double energy;
    QuantumState state;
  };
  std::vector<Entry> entries;

  const int bx = axis_bound(geom.length_nm, cutoff_meV);
  const int by = axis_bound(geom.width_nm, cutoff_meV);
  const int bz = axis_bound(geom.height_nm, cutoff_meV);
  for (int x = 1; x <= bx; ++x) {
    for (int y = 1; y <= by; ++y) {
      for (int z = 1; z <= bz; ++z) {
        const QuantumState s{x, y, z};
        const double e = state_energy(s, geom);
        if (e > cutoff_meV) break;  // energy increases with z
        entries.push_back({e, s});
      }
    }
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.state < b.state;
  });

  std::vector<EnergyLevel> levels;
  for (const auto& e : entries) {
    if (!levels.empty() &&
        e.energy - levels.back().energy_meV < kDegeneracyTolerance_meV) {
      levels.back().states.push_back(e.state);
    } else {
      levels.push_back(EnergyLevel{{e.state}, e.energy});
    }
  }
  for (auto& lvl : levels) std::sort(lvl.states.begin(), lvl.states.end());

  return StateTable(geom, cutoff_meV, std::move(levels));
}

std::vector<EnergyLevel> find_states_near(const StateTable& table, double target_meV,
                                          double tol_meV) {
  if (!(tol_meV > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (target_meV > table.cutoff_meV()) {
    throw CutoffError(fmt::format(
        "target {} meV exceeds table cutoff {} meV; re-enumerate with a higher cutoff",
        target_meV, table.cutoff_meV()));
  }
  std::vector<EnergyLevel> out;
  for (const auto& lvl : table.levels()) {
    if (std::abs(lvl.energy_meV - target_meV) <= tol_meV) out.push_back(lvl);
  }
  std::stable_sort(out.begin(), out.end(), [target_meV](const auto& a, const auto& b) {
    const double da = std::abs(a.energy_meV - target_meV);
    const double db = std::abs(b.energy_meV - target_meV);
    if (da != db) return da < db;
    return a.energy_meV < b.energy_meV;
  });
  return out;
}

double level_gap(const StateTable& table, QuantumState upper, QuantumState lower) {
  return table.energy_of(upper) - table.energy_of(lower);
}

void write_table_csv(std::ostream& os, const StateTable& table) {
  os << "nx,ny,nz,energy_meV,occupation_N,degeneracy\n";
  for (const auto& lvl : table.levels()) {
    for (const auto& s : lvl.states) {
      fmt::print(os, "{},{},{},{:.4f},{},{}\n", s.nx, s.ny, s.nz, lvl.energy_meV,
                 occupation_number(s), lvl.degeneracy());
    }
  }
}

std::span<const QuantumState> landmark_states() {
  static constexpr std::array<QuantumState, 12> kStates{{
      {1, 1, 1},
      {3, 2, 1},
      {4, 2, 1},
      {4, 3, 1},
      {5, 2, 1},
      {2, 2, 2},
      {3, 2, 2},
      {4, 4, 2},
      {5, 4, 2},
      {2, 2, 3},
      {4, 4, 4},
      {5, 4, 4},
  }};
  return kStates;
}

}  // namespace nanoshuttle
