#pragma once

#include "mdfn/design.hpp"

#include <cstddef>
#include <vector>

namespace mdfn {

/// Solver discretization and tolerance settings.
struct SolverConfig {
  int nodes_per_region = 30;     //!< finite-volume cells per layer
  int radial_shells = 20;        //!< control shells per particle
  double newton_tol = 1e-9;      //!< scaled residual tolerance
  int max_newton_iters = 25;
  double dt_initial = 0.1;       //!< [s]
  double dt_min = 1e-4;          //!< [s]
  double dt_max = 30.0;          //!< [s]
  double cutoff_bisection_tol = 5e-5; //!< [V]
  int snapshot_count = 20;       //!< spatial snapshots per constant-current step

  void validate() const;
};

/// Cell-centered finite-volume mesh over the through-thickness direction.
/// Region boundaries fall exactly on control-volume faces; spacing is uniform
/// within each region.
struct Mesh {
  struct Region {
    std::size_t layer_index;   //!< index into CellDesign::layers
    std::size_t first_node;    //!< global index of the first cell in this region
    std::size_t node_count;
    double dx;                 //!< cell width [m]
    double x_left;             //!< region start [m]
  };

  std::vector<Region> regions;
  std::vector<double> x_center;      //!< cell-center positions [m]
  std::vector<double> dx;            //!< per-cell width [m]
  std::vector<int> region_of_node;   //!< region index per global node
  std::vector<int> electrode_index;  //!< per global node: dense electrode-node index or -1
  std::vector<std::size_t> electrode_nodes; //!< global indices of electrode nodes
  int radial_shells = 0;

  std::size_t node_count() const { return x_center.size(); }
  std::size_t electrode_node_count() const { return electrode_nodes.size(); }
};

Mesh build_mesh(const CellDesign &design, const SolverConfig &config);

} // namespace mdfn
