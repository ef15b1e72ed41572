#pragma once

#include "mdfn/banded.hpp"
#include "mdfn/constants.hpp"
#include "mdfn/state.hpp"

#include <cstddef>
#include <vector>

namespace mdfn {

/// Implicit (backward Euler) integrator for the coupled M-DFN system.
///
/// Each step solves the fully coupled nonlinear system (electrolyte species,
/// electrolyte charge, solid charge) with Newton iteration on a banded
/// Jacobian. Particle diffusion is condensed out exactly: for a linear radial
/// backward-Euler system the surface concentration responds affinely to the
/// surface flux, so each electrode node contributes one nonlinear scalar
/// (the reaction current density) solved by safeguarded Newton inside the
/// residual evaluation.
///
/// Sign convention: applied current density i_app > 0 charges the half-cell
/// (delithiates the cathode).
class CellSolver {
public:
  CellSolver(const CellDesign &design, const Mesh &mesh, const SolverConfig &config,
             KineticsContext ctx = {});

  struct StepOutcome {
    bool converged = false;
    int iterations = 0;
    CellState state;
  };

  StepOutcome step(const CellState &old_state, double i_app, double dt) const;

  /// Terminal voltage for a converged state under applied current density
  /// i_app [A/m^2]: solid potential extrapolated to the current collector,
  /// referenced to the Li counter electrode, plus the contact-resistance drop.
  double voltage(const CellState &state, double i_app) const;

  /// Minimum electrolyte concentration and its node.
  double min_ce(const CellState &state, std::size_t *node = nullptr) const;

  /// Electrolyte concentration extrapolated to the counter-electrode surface
  /// (x = 0) under applied current density i_app; the true minimum of the
  /// concentration field sits on this face during charge.
  double ce_at_counter_electrode(const CellState &state, double i_app) const;

  const Mesh &mesh() const { return mesh_; }
  const CellDesign &design() const { return design_; }
  const SolverConfig &config() const { return config_; }
  const KineticsContext &context() const { return ctx_; }

private:
  struct StepWork {
    double dt = 0.0;
    double i_app = 0.0;
    std::vector<double> csurf0;  //!< zero-flux surface concentration per electrode node
    std::vector<double> beta;    //!< d(c_surf)/dJ magnitude per electrode node [mol s / (m A)]
    std::vector<double> c0;      //!< zero-flux radial profiles, node major
    std::vector<double> csens;   //!< radial profile sensitivity to unit surface flux
    mutable std::vector<double> j_warm; //!< warm starts for the scalar reaction solves
  };

  void precompute_radial(const CellState &old_state, double dt, StepWork &work) const;
  double reaction_current(std::size_t k, double phi_s, double phi_e, double c_e,
                          const StepWork &work) const;
  void assemble_residual(const std::vector<double> &u, const CellState &old_state,
                         const StepWork &work, std::vector<double> &R,
                         std::vector<double> *j_out) const;

  void pack(const CellState &s, std::vector<double> &u) const;
  void unpack(const std::vector<double> &u, CellState &s) const;

  const CellDesign &design_;
  const Mesh &mesh_;
  const SolverConfig &config_;
  KineticsContext ctx_;

  // per-node precomputed coefficients
  std::vector<double> eps_e_, brug_pow_, a_p_, sigma_eff_;
  // per-electrode-node material data
  std::vector<double> k_rate_, c_s_max_, D_s_, dr_;
  std::vector<const OcpCurve *> ocp_;

  // unknown layout
  std::vector<int> iu_ce_, iu_pe_, iu_ps_;
  std::vector<double> fd_step_;
  int n_unknowns_ = 0;
  int band_ = 0;
};

} // namespace mdfn
