#pragma once

#include "mdfn/stepper.hpp"

#include <optional>
#include <vector>

namespace mdfn {

enum class Termination { Cutoff, TimeLimit, DepletionAssistedCutoff, SolverFailure };

const char *to_string(Termination t);

/// Spatial fields captured at one instant during a run.
struct Snapshot {
  double time = 0.0;
  std::vector<double> c_e;        //!< per node
  std::vector<double> phi_e;      //!< per node
  std::vector<double> c_s_surf;   //!< per electrode node
  std::vector<double> j_rxn;      //!< per electrode node [A/m^2]
};

struct DepletionEvent {
  double time = 0.0;
  std::size_t node = 0;
  double c_e = 0.0;
};

/// Result of a single constant-current (or rest) segment.
struct SimulationResult {
  std::vector<double> t;   //!< [s]
  std::vector<double> V;   //!< [V]
  std::vector<double> I;   //!< cell current [A]
  std::vector<double> q;   //!< cumulative areal capacity within the segment [mAh/cm^2]
  std::vector<Snapshot> snapshots;
  Termination termination = Termination::TimeLimit;
  std::optional<DepletionEvent> depletion;
  double peak_phi_e = 0.0;
  std::size_t peak_phi_e_node = 0;
  double min_c_e = 0.0;           //!< over all nodes and the counter-electrode face
  std::size_t min_c_e_node = 0;
  double min_c_e_electrode = 0.0; //!< restricted to electrode-region nodes
  std::size_t min_c_e_electrode_node = 0;
  CellState final_state;

  double capacity_mAh_cm2() const { return q.empty() ? 0.0 : q.back(); }
  double duration_s() const { return t.empty() ? 0.0 : t.back() - t.front(); }
};

struct StopCondition {
  std::optional<double> cutoff_voltage; //!< upper when charging, lower when discharging
  std::optional<double> time_limit_s;
};

/// Runs one constant-current segment with adaptive implicit time stepping.
/// current_A > 0 charges (delithiates) the cathode. Cutoff crossings are
/// located by bisection on the step size. Electrolyte depletion below the
/// positivity floor raises a diagnostic but integration continues to the
/// stop condition.
SimulationResult simulate_cc(const CellSolver &solver, const CellState &start,
                             double current_A, const StopCondition &stop);

} // namespace mdfn
