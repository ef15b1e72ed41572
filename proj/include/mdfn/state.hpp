#pragma once

#include "mdfn/mesh.hpp"

#include <vector>

namespace mdfn {

enum class Direction { Charge, Discharge };

/// Fully discretized state of the cell at one instant.
struct CellState {
  std::vector<double> c_e;    //!< electrolyte concentration per node [mol/m^3]
  std::vector<double> phi_e;  //!< electrolyte potential per node [V]
  std::vector<double> phi_s;  //!< solid potential per electrode node [V]
  std::vector<double> c_s;    //!< particle concentration, electrode node major, shell minor [mol/m^3]
  std::vector<double> j_rxn;  //!< last converged reaction current density per electrode node [A/m^2]
  double time = 0.0;          //!< [s]

  double c_s_at(const Mesh &mesh, std::size_t electrode_node, std::size_t shell) const {
    return c_s[electrode_node * mesh.radial_shells + shell];
  }
};

/// Uniform-state initialization for the requested protocol direction.
CellState initial_state(const CellDesign &design, const Mesh &mesh, Direction direction);

/// Volume-averaged particle concentration at one electrode node [mol/m^3].
double mean_particle_concentration(const Mesh &mesh, const CellState &state,
                                   std::size_t electrode_node);

/// Total lithium inventory per unit cross-section [mol/m^2]:
/// electrolyte (eps_e * c_e * dx) plus solid (eps_s * volume-averaged c_s * dx).
double lithium_inventory(const CellDesign &design, const Mesh &mesh, const CellState &state);

} // namespace mdfn
