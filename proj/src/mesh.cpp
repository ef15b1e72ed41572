#include "mdfn/mesh.hpp"

#include "mdfn/errors.hpp"

namespace mdfn {

void SolverConfig::validate() const {
  if (nodes_per_region < 3)
    throw ConfigError("solver: need at least 3 nodes per region");
  if (radial_shells < 3)
    throw ConfigError("solver: need at least 3 radial shells");
  if (!(newton_tol > 0.0) || !(cutoff_bisection_tol > 0.0))
    throw ConfigError("solver: tolerances must be positive");
  if (max_newton_iters < 1)
    throw ConfigError("solver: max_newton_iters must be positive");
  if (!(dt_min > 0.0 && dt_min <= dt_initial && dt_initial <= dt_max))
    throw ConfigError("solver: require 0 < dt_min <= dt_initial <= dt_max");
  if (snapshot_count < 1)
    throw ConfigError("solver: snapshot_count must be positive");
}

Mesh build_mesh(const CellDesign &design, const SolverConfig &config) {
  design.validate();
  config.validate();

  Mesh mesh;
  mesh.radial_shells = config.radial_shells;
  double x = 0.0;
  for (std::size_t li = 0; li < design.layers.size(); ++li) {
    const LayerSpec &layer = design.layers[li];
    const std::size_t n = static_cast<std::size_t>(config.nodes_per_region);
    const double dx = layer.L / static_cast<double>(n);
    if (!(dx > 0.0))
      throw ConfigError("mesh: degenerate layer thickness");

    Mesh::Region r;
    r.layer_index = li;
    r.first_node = mesh.x_center.size();
    r.node_count = n;
    r.dx = dx;
    r.x_left = x;
    mesh.regions.push_back(r);

    for (std::size_t i = 0; i < n; ++i) {
      mesh.x_center.push_back(x + (static_cast<double>(i) + 0.5) * dx);
      mesh.dx.push_back(dx);
      mesh.region_of_node.push_back(static_cast<int>(mesh.regions.size()) - 1);
      if (layer.is_electrode()) {
        mesh.electrode_index.push_back(static_cast<int>(mesh.electrode_nodes.size()));
        mesh.electrode_nodes.push_back(mesh.x_center.size() - 1);
      } else {
        mesh.electrode_index.push_back(-1);
      }
    }
    x += layer.L;
  }
  return mesh;
}

} // namespace mdfn
