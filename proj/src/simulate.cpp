#include "mdfn/simulate.hpp"

#include "mdfn/errors.hpp"

#include <cmath>

namespace mdfn {

namespace {
constexpr double kDepletionFloor = 1.0; // [mol/m^3]

Snapshot take_snapshot(const CellSolver &solver, const CellState &s) {
  const Mesh &mesh = solver.mesh();
  Snapshot snap;
  snap.time = s.time;
  snap.c_e = s.c_e;
  snap.phi_e = s.phi_e;
  snap.j_rxn = s.j_rxn;
  const int m = mesh.radial_shells;
  snap.c_s_surf.resize(mesh.electrode_node_count());
  for (std::size_t k = 0; k < mesh.electrode_node_count(); ++k) {
    // outer-shell value plus half-shell extrapolation using the surface flux
    const std::size_t node = mesh.electrode_nodes[k];
    const auto &layer = solver.design().layers[mesh.regions[mesh.region_of_node[node]].layer_index];
    const double dr = layer.chemistry->R_p / m;
    const double q = s.j_rxn[k] / solver.context().F;
    snap.c_s_surf[k] = s.c_s[k * m + m - 1] - q * dr / (2.0 * layer.chemistry->D_s);
  }
  return snap;
}
} // namespace

const char *to_string(Termination t) {
  switch (t) {
  case Termination::Cutoff: return "cutoff";
  case Termination::TimeLimit: return "time-limit";
  case Termination::DepletionAssistedCutoff: return "depletion-assisted-cutoff";
  case Termination::SolverFailure: return "solver-failure";
  }
  return "?";
}

SimulationResult simulate_cc(const CellSolver &solver, const CellState &start,
                             double current_A, const StopCondition &stop) {
  const SolverConfig &cfg = solver.config();
  const CellDesign &design = solver.design();
  const double i_app = current_A / design.area; // [A/m^2]
  const bool charging = current_A > 0.0;
  const bool resting = current_A == 0.0;

  if (!stop.cutoff_voltage && !stop.time_limit_s)
    throw ConfigError("simulate_cc: need a voltage cutoff and/or time limit");

  SimulationResult res;
  CellState state = start;
  const double t0 = state.time;

  // capacity accumulates as |I| dt; areal units mAh/cm^2
  const double q_factor = std::abs(current_A) / design.area / 3600.0 * 0.1;

  auto record = [&](const CellState &s, double V) {
    res.t.push_back(s.time);
    res.V.push_back(V);
    res.I.push_back(current_A);
    res.q.push_back(q_factor * (s.time - t0));
  };

  // initial sample: rest voltage of the incoming state
  record(state, solver.voltage(state, 0.0));
  res.snapshots.push_back(take_snapshot(solver, state));
  std::size_t snap_every = 1, accepted = 0;

  const Mesh &mesh = solver.mesh();
  auto electrode_min = [&](const CellState &s, std::size_t *node) {
    double best = s.c_e[mesh.electrode_nodes.front()];
    std::size_t arg = mesh.electrode_nodes.front();
    for (std::size_t i : mesh.electrode_nodes)
      if (s.c_e[i] < best) {
        best = s.c_e[i];
        arg = i;
      }
    if (node)
      *node = arg;
    return best;
  };

  std::size_t mn_node = 0;
  res.min_c_e = solver.min_ce(state, &mn_node);
  res.min_c_e_node = mn_node;
  res.min_c_e_electrode = electrode_min(state, &res.min_c_e_electrode_node);

  double dt = cfg.dt_initial;
  bool hit_cutoff = false;

  while (true) {
    double dt_try = std::min(dt, cfg.dt_max);
    if (stop.time_limit_s) {
      const double remaining = (t0 + *stop.time_limit_s) - state.time;
      if (remaining <= 1e-12) {
        res.termination = Termination::TimeLimit;
        break;
      }
      dt_try = std::min(dt_try, remaining);
    }

    CellSolver::StepOutcome out = solver.step(state, i_app, dt_try);
    if (!out.converged) {
      if (dt_try <= cfg.dt_min * (1.0 + 1e-12)) {
        res.termination = Termination::SolverFailure;
        break;
      }
      dt = std::max(cfg.dt_min, dt_try * 0.5);
      continue;
    }

    double V = solver.voltage(out.state, i_app);
    const bool crossed = !resting && stop.cutoff_voltage &&
                         (charging ? V >= *stop.cutoff_voltage : V <= *stop.cutoff_voltage);
    if (crossed && std::abs(V - *stop.cutoff_voltage) > cfg.cutoff_bisection_tol) {
      // bisect the step size to land on the crossing
      double lo = 0.0, hi = dt_try;
      CellSolver::StepOutcome best = out;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid < cfg.dt_min)
          break;
        CellSolver::StepOutcome trial = solver.step(state, i_app, mid);
        if (!trial.converged) {
          lo = mid; // treat as not-yet-crossed and shrink from the other side
          continue;
        }
        const double Vm = solver.voltage(trial.state, i_app);
        const bool over = charging ? Vm >= *stop.cutoff_voltage : Vm <= *stop.cutoff_voltage;
        if (over) {
          hi = mid;
          best = trial;
          V = Vm;
        } else {
          lo = mid;
        }
        if (std::abs(Vm - *stop.cutoff_voltage) <= cfg.cutoff_bisection_tol && over)
          break;
      }
      out = best;
      V = solver.voltage(out.state, i_app);
    }

    state = out.state;
    record(state, V);
    ++accepted;
    if (accepted % snap_every == 0) {
      res.snapshots.push_back(take_snapshot(solver, state));
      if (res.snapshots.size() > 2 * static_cast<std::size_t>(cfg.snapshot_count)) {
        // thin to every other snapshot, keeping first
        std::vector<Snapshot> kept;
        for (std::size_t i = 0; i < res.snapshots.size(); i += 2)
          kept.push_back(res.snapshots[i]);
        res.snapshots = std::move(kept);
        snap_every *= 2;
      }
    }

    double mn = solver.min_ce(state, &mn_node);
    const double mn_face = solver.ce_at_counter_electrode(state, i_app);
    if (mn_face < mn) {
      mn = mn_face;
      mn_node = 0;
    }
    if (mn < res.min_c_e) {
      res.min_c_e = mn;
      res.min_c_e_node = mn_node;
    }
    std::size_t en = 0;
    const double emn = electrode_min(state, &en);
    if (emn < res.min_c_e_electrode) {
      res.min_c_e_electrode = emn;
      res.min_c_e_electrode_node = en;
    }
    if (!res.depletion && mn < kDepletionFloor)
      res.depletion = DepletionEvent{state.time, mn_node, mn};
    for (std::size_t i = 0; i < state.phi_e.size(); ++i)
      if (std::abs(state.phi_e[i]) > std::abs(res.peak_phi_e)) {
        res.peak_phi_e = state.phi_e[i];
        res.peak_phi_e_node = i;
      }

    if (crossed) {
      res.termination = res.depletion ? Termination::DepletionAssistedCutoff : Termination::Cutoff;
      hit_cutoff = true;
      break;
    }

    // adapt on Newton effort
    if (out.iterations <= 5)
      dt = std::min(dt_try * 1.4, cfg.dt_max);
    else if (out.iterations > 12)
      dt = std::max(dt_try * 0.5, cfg.dt_min);
    else
      dt = dt_try;
  }
  (void)hit_cutoff;

  if (res.snapshots.empty() || res.snapshots.back().time != state.time)
    res.snapshots.push_back(take_snapshot(solver, state));
  res.final_state = state;
  return res;
}

} // namespace mdfn
