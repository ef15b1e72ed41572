// Manual smoke harness: charge/discharge runs with timing printouts.
#include "mdfn/design.hpp"
#include "mdfn/simulate.hpp"
#include "mdfn/state.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

using namespace mdfn;

int main(int argc, char **argv) {
  const std::string preset_name = argc > 1 ? argv[1] : "default-bilayer";
  const double c_rate = argc > 2 ? std::stod(argv[2]) : 0.05;
  const bool discharge = argc > 3 && std::string(argv[3]) == "discharge";

  CellDesign design = CellDesign::preset(preset_name);
  if (argc > 4)
    design.j0_ce = std::stod(argv[4]);
  if (argc > 6) { // experimental electrolyte scaling: D_e x s6, kappa x s7
    const double ds = std::stod(argv[6]);
    const double ks = argc > 7 ? std::stod(argv[7]) : 1.0;
    auto d0 = design.electrolyte.D_e_bulk;
    auto k0 = design.electrolyte.kappa_e_bulk;
    design.electrolyte.D_e_bulk = [=](double c, double T) { return ds * d0(c, T); };
    design.electrolyte.kappa_e_bulk = [=](double c, double T) { return ks * k0(c, T); };
  }
  SolverConfig cfg;
  if (argc > 8)
    cfg.nodes_per_region = std::stoi(argv[8]);
  if (argc > 9)
    cfg.radial_shells = std::stoi(argv[9]);
  Mesh mesh = build_mesh(design, cfg);
  CellSolver solver(design, mesh, cfg);

  double i1c_A = design.i_1c_A();
  if (argc > 5)
    i1c_A = 1e-3 * std::stod(argv[5]);
  const double I = (discharge ? -1.0 : 1.0) * c_rate * i1c_A;
  CellState s0 = initial_state(design, mesh, discharge ? Direction::Discharge : Direction::Charge);

  StopCondition stop;
  stop.cutoff_voltage = discharge ? design.cutoff_lower : design.cutoff_upper;
  stop.time_limit_s = 3600.0 / c_rate; // nominal full-charge duration at this rate

  const auto t0 = std::chrono::steady_clock::now();
  SimulationResult res = simulate_cc(solver, s0, I, stop);
  const auto t1 = std::chrono::steady_clock::now();
  const double wall = std::chrono::duration<double>(t1 - t0).count();

  std::printf("preset=%s rate=%.3gC I=%.4g mA dir=%s\n", preset_name.c_str(), c_rate,
              1e3 * I, discharge ? "discharge" : "charge");
  std::printf("theoretical=%.4f rated=%.4f mAh/cm^2  I_1C=%.4f mA\n",
              design.theoretical_capacity_mAh_cm2(), design.rated_capacity_mAh_cm2(),
              1e3 * design.i_1c_A());
  std::printf("capacity=%.4f mAh/cm^2  duration=%.1f s  steps=%zu  wall=%.2f s\n",
              res.capacity_mAh_cm2(), res.duration_s(), res.t.size(), wall);
  std::printf("termination=%s  Vend=%.5f  min_ce=%.4g@%zu  peak_phi_e=%.4g\n",
              to_string(res.termination), res.V.back(), res.min_c_e, res.min_c_e_node,
              res.peak_phi_e);
  if (res.depletion)
    std::printf("depletion at t=%.1f node=%zu c_e=%.4g\n", res.depletion->time,
                res.depletion->node, res.depletion->c_e);
  if (std::getenv("SMOKE_DUMP")) {
    const auto &snap = res.snapshots.back();
    std::printf("final snapshot t=%.1f\n node  x[um]    c_e     phi_e     j_rxn   c_surf  theta\n", snap.time);
    for (std::size_t i = 0; i < snap.c_e.size(); ++i) {
      const int k = mesh.electrode_index[i];
      const double xum = 1e6 * mesh.x_center[i];
      if (k < 0)
        std::printf("%5zu %7.2f %8.1f %9.4f\n", i, xum, snap.c_e[i], snap.phi_e[i]);
      else {
        const auto &layer = design.layers[mesh.regions[mesh.region_of_node[i]].layer_index];
        std::printf("%5zu %7.2f %8.1f %9.4f %9.3f %8.0f %6.3f\n", i, xum, snap.c_e[i],
                    snap.phi_e[i], snap.j_rxn[k], snap.c_s_surf[k],
                    snap.c_s_surf[k] / layer.chemistry->c_s_max);
      }
    }
  }
  // lithium conservation check
  const double li0 = lithium_inventory(design, mesh, s0);
  const double li1 = lithium_inventory(design, mesh, res.final_state);
  const double expected = (I / design.area) * res.duration_s() / solver.context().F;
  std::printf("inventory drop=%.6e expected=%.6e rel_err=%.3e\n", li0 - li1, expected,
              (li0 - li1 - expected) / (std::abs(expected) + 1e-30));
  return 0;
}
