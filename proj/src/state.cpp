#include "mdfn/state.hpp"

#include "mdfn/errors.hpp"

namespace mdfn {

CellState initial_state(const CellDesign &design, const Mesh &mesh, Direction direction) {
  CellState s;
  const std::size_t n = mesh.node_count();
  const std::size_t ne = mesh.electrode_node_count();
  const int m = mesh.radial_shells;

  s.c_e.assign(n, design.electrolyte.c_e0);
  s.phi_e.assign(n, 0.0);
  s.phi_s.assign(ne, 0.0);
  s.c_s.assign(ne * m, 0.0);
  s.j_rxn.assign(ne, 0.0);

  for (std::size_t k = 0; k < ne; ++k) {
    const std::size_t node = mesh.electrode_nodes[k];
    const auto &region = mesh.regions[mesh.region_of_node[node]];
    const LayerSpec &layer = design.layers[region.layer_index];
    const double c0 = direction == Direction::Charge ? layer.c_s_init_charge
                                                     : layer.c_s_init_discharge;
    for (int j = 0; j < m; ++j)
      s.c_s[k * m + j] = c0;
    // potentials consistent with zero current: phi_e = 0 (the counter
    // electrode is the reference), phi_s = local OCP
    const double x = c0 / layer.chemistry->c_s_max;
    s.phi_s[k] = layer.chemistry->ocp.value_extended(x);
  }
  return s;
}

double mean_particle_concentration(const Mesh &mesh, const CellState &state,
                                   std::size_t electrode_node) {
  const int m = mesh.radial_shells;
  // shell volumes proportional to r_{j+1}^3 - r_j^3 on a uniform radial grid
  double num = 0.0, den = 0.0;
  for (int j = 0; j < m; ++j) {
    const double r0 = static_cast<double>(j);
    const double r1 = static_cast<double>(j + 1);
    const double vol = r1 * r1 * r1 - r0 * r0 * r0;
    num += vol * state.c_s[electrode_node * m + j];
    den += vol;
  }
  return num / den;
}

double lithium_inventory(const CellDesign &design, const Mesh &mesh, const CellState &state) {
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    const auto &region = mesh.regions[mesh.region_of_node[i]];
    const LayerSpec &layer = design.layers[region.layer_index];
    total += layer.eps_e * state.c_e[i] * mesh.dx[i];
    const int k = mesh.electrode_index[i];
    if (k >= 0)
      total += layer.eps_solid() * mean_particle_concentration(mesh, state, k) * mesh.dx[i];
  }
  return total;
}

} // namespace mdfn
