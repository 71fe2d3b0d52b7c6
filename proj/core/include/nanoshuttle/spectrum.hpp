#pragma once

// Single-particle levels of a hard-wall rectangular box.
//
//   E(nx, ny, nz) = (pi^2 hbar^2 / 2 m_e) (nx^2/L^2 + ny^2/W^2 + nz^2/H^2)
//
// Energies are in meV, lengths in nm.

#include <compare>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nanoshuttle {

struct BoxGeometry {
  double length_nm = 8.0;
  double width_nm = 8.0;
  double height_nm = 3.0;

  /// Throws std::invalid_argument unless all dimensions are > 0.
  void validate() const;

  BoxGeometry scaled(double factor) const {
    return {length_nm * factor, width_nm * factor, height_nm * factor};
  }
};

struct QuantumState {
  int nx = 1;
  int ny = 1;
  int nz = 1;

  constexpr QuantumState() = default;
  constexpr QuantumState(int x, int y, int z) : nx(x), ny(y), nz(z) {
    if (x < 1 || y < 1 || z < 1) {
      throw std::invalid_argument("quantum numbers must be >= 1");
    }
  }

  constexpr auto operator<=>(const QuantumState&) const = default;
};

/// nx + ny + nz.
constexpr int occupation_number(QuantumState s) { return s.nx + s.ny + s.nz; }

/// |nx - ny|, the in-plane imbalance.
constexpr int lateral_imbalance(QuantumState s) {
  return s.nx > s.ny ? s.nx - s.ny : s.ny - s.nx;
}

double state_energy(QuantumState state, const BoxGeometry& geom);

/// "[nx,ny,nz]".
std::string format_state(QuantumState s);

/// States whose energies agree to within kDegeneracyTolerance_meV. Members
/// are usually permutation partners, but accidental degeneracies
/// (7^2 + 4^2 == 8^2 + 1^2) land in the same level too, which is why
/// occupation is per state.
struct EnergyLevel {
  std::vector<QuantumState> states;  // sorted ascending
  double energy_meV = 0.0;

  std::size_t degeneracy() const { return states.size(); }
  bool contains(QuantumState s) const;
  /// The shared occupation number, or nullopt when members disagree.
  std::optional<int> occupation() const;
  /// "[2,3,1]/[3,2,1]".
  std::string label() const;
};

inline constexpr double kDegeneracyTolerance_meV = 1e-9;

class StateTable {
 public:
  StateTable() = default;
  StateTable(BoxGeometry geom, double cutoff_meV, std::vector<EnergyLevel> levels);

  const std::vector<EnergyLevel>& levels() const { return levels_; }
  double cutoff_meV() const { return cutoff_meV_; }
  const BoxGeometry& geometry() const { return geometry_; }
  bool empty() const { return levels_.empty(); }
  std::size_t state_count() const;

  /// Level holding `s`, or nullptr when `s` lies above the cutoff.
  const EnergyLevel* find(QuantumState s) const;
  /// Energy of `s`; throws CutoffError when `s` is above the cutoff.
  double energy_of(QuantumState s) const;

 private:
  BoxGeometry geometry_{};
  double cutoff_meV_ = 0.0;
  std::vector<EnergyLevel> levels_;
};

/// Per-axis search bound that guarantees no state at or below `cutoff_meV`
/// is missed.
int axis_bound(double dimension_nm, double cutoff_meV);

/// Every state with energy <= cutoff, grouped into degenerate levels and
/// sorted ascending. A cutoff below the ground state yields an empty table.
StateTable enumerate_levels(const BoxGeometry& geom, double cutoff_meV);

/// Levels with |E - target| <= tol, nearest first (ties by energy).
/// Throws CutoffError if target exceeds the table's cutoff.
std::vector<EnergyLevel> find_states_near(const StateTable& table, double target_meV,
                                          double tol_meV);

/// E(upper) - E(lower). Throws CutoffError if either state is outside the table.
double level_gap(const StateTable& table, QuantumState upper, QuantumState lower);

/// CSV: nx,ny,nz,energy_meV,occupation_N,degeneracy; one row per state.
void write_table_csv(std::ostream& os, const StateTable& table);

/// The twelve landmark states of the device model (one member per degenerate
/// pair), in ascending energy for the 8x8x3 box.
std::span<const QuantumState> landmark_states();

}  // namespace nanoshuttle
