#include "mdfn/stepper.hpp"

#include "mdfn/errors.hpp"
#include "mdfn/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace mdfn {

namespace {
constexpr double kCeFloor = 1e-6;      // hard positivity floor for Newton damping [mol/m^3]
constexpr double kCePropFloor = 1e-2;  // clamp for property evaluation [mol/m^3]
constexpr double kCsMargin = 1e-8;     // relative margin keeping c_surf off the singular ends

double harmonic_face(double wL, double dL, double wR, double dR) {
  return (wL + wR) / (wL / dL + wR / dR);
}
} // namespace

CellSolver::CellSolver(const CellDesign &design, const Mesh &mesh, const SolverConfig &config,
                       KineticsContext ctx)
    : design_(design), mesh_(mesh), config_(config), ctx_(ctx) {
  const std::size_t n = mesh_.node_count();
  eps_e_.resize(n);
  brug_pow_.resize(n);
  a_p_.resize(n, 0.0);
  sigma_eff_.resize(n, 0.0);
  iu_ce_.resize(n);
  iu_pe_.resize(n);
  iu_ps_.assign(n, -1);

  int iu = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const LayerSpec &layer = design_.layers[mesh_.regions[mesh_.region_of_node[i]].layer_index];
    eps_e_[i] = layer.eps_e;
    brug_pow_[i] = std::pow(layer.eps_e, layer.b);
    iu_ce_[i] = iu++;
    iu_pe_[i] = iu++;
    if (layer.is_electrode()) {
      a_p_[i] = specific_surface_area(layer.eps_e, layer.eps_cbd, layer.chemistry->R_p);
      sigma_eff_[i] = layer.sigma_s * std::pow(layer.eps_solid(), layer.b);
      iu_ps_[i] = iu++;
    }
  }
  n_unknowns_ = iu;

  fd_step_.assign(n_unknowns_, 1e-6); // potentials [V]
  for (std::size_t i = 0; i < n; ++i)
    fd_step_[iu_ce_[i]] = 1e-3; // concentrations [mol/m^3]

  const std::size_t ne = mesh_.electrode_node_count();
  k_rate_.resize(ne);
  c_s_max_.resize(ne);
  D_s_.resize(ne);
  dr_.resize(ne);
  ocp_.resize(ne);
  for (std::size_t k = 0; k < ne; ++k) {
    const std::size_t node = mesh_.electrode_nodes[k];
    const LayerSpec &layer = design_.layers[mesh_.regions[mesh_.region_of_node[node]].layer_index];
    k_rate_[k] = layer.chemistry->k_rate;
    c_s_max_[k] = layer.chemistry->c_s_max;
    D_s_[k] = layer.chemistry->D_s;
    dr_[k] = layer.chemistry->R_p / mesh_.radial_shells;
    ocp_[k] = &layer.chemistry->ocp;
  }

  // band width: residual rows of node i couple to unknowns of nodes i-1..i+1
  int band = 0;
  auto node_min = [&](std::size_t i) { return iu_ce_[i]; };
  auto node_max = [&](std::size_t i) { return iu_ps_[i] >= 0 ? iu_ps_[i] : iu_pe_[i]; };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(n - 1, i + 1);
    band = std::max(band, node_max(hi) - node_min(i));
    band = std::max(band, node_max(i) - node_min(lo));
  }
  band_ = band;
}

void CellSolver::pack(const CellState &s, std::vector<double> &u) const {
  u.resize(n_unknowns_);
  for (std::size_t i = 0; i < mesh_.node_count(); ++i) {
    u[iu_ce_[i]] = s.c_e[i];
    u[iu_pe_[i]] = s.phi_e[i];
    if (iu_ps_[i] >= 0)
      u[iu_ps_[i]] = s.phi_s[mesh_.electrode_index[i]];
  }
}

void CellSolver::unpack(const std::vector<double> &u, CellState &s) const {
  for (std::size_t i = 0; i < mesh_.node_count(); ++i) {
    s.c_e[i] = u[iu_ce_[i]];
    s.phi_e[i] = u[iu_pe_[i]];
    if (iu_ps_[i] >= 0)
      s.phi_s[mesh_.electrode_index[i]] = u[iu_ps_[i]];
  }
}

void CellSolver::precompute_radial(const CellState &old_state, double dt, StepWork &work) const {
  const std::size_t ne = mesh_.electrode_node_count();
  const int m = mesh_.radial_shells;
  work.dt = dt;
  work.csurf0.resize(ne);
  work.beta.resize(ne);
  work.c0.resize(ne * m);
  work.csens.resize(ne * m);
  work.j_warm = old_state.j_rxn;

  std::vector<double> lower(m), diag(m), upper(m), rhs0(m), rhs1(m), cp(m), dp0(m), dp1(m);

  for (std::size_t k = 0; k < ne; ++k) {
    const double dr = dr_[k];
    const double D = D_s_[k];
    // faces at r_j = j dr, shell volumes V_j = ((j+1)^3 - j^3) dr^3 / 3
    for (int j = 0; j < m; ++j) {
      const double vol = (std::pow(j + 1.0, 3) - std::pow(static_cast<double>(j), 3)) *
                         dr * dr * dr / 3.0;
      const double a_in = static_cast<double>(j) * j * dr * dr;           // inner face area
      const double a_out = (j + 1.0) * (j + 1.0) * dr * dr;               // outer face area
      const double t_in = j > 0 ? D * a_in / dr : 0.0;
      const double t_out = j < m - 1 ? D * a_out / dr : 0.0;
      lower[j] = -t_in;
      upper[j] = -t_out;
      diag[j] = vol / dt + t_in + t_out;
      rhs0[j] = vol / dt * old_state.c_s[k * m + j];
      rhs1[j] = 0.0;
    }
    // unit surface molar flux q = 1 removes A_m from the outer shell
    rhs1[m - 1] = -(static_cast<double>(m) * m * dr * dr);

    // Thomas algorithm, two right-hand sides
    cp[0] = upper[0] / diag[0];
    dp0[0] = rhs0[0] / diag[0];
    dp1[0] = rhs1[0] / diag[0];
    for (int j = 1; j < m; ++j) {
      const double denom = diag[j] - lower[j] * cp[j - 1];
      cp[j] = upper[j] / denom;
      dp0[j] = (rhs0[j] - lower[j] * dp0[j - 1]) / denom;
      dp1[j] = (rhs1[j] - lower[j] * dp1[j - 1]) / denom;
    }
    double *c0 = &work.c0[k * m];
    double *cs = &work.csens[k * m];
    c0[m - 1] = dp0[m - 1];
    cs[m - 1] = dp1[m - 1];
    for (int j = m - 2; j >= 0; --j) {
      c0[j] = dp0[j] - cp[j] * c0[j + 1];
      cs[j] = dp1[j] - cp[j] * cs[j + 1];
    }

    // surface value extrapolated half a shell outward using the imposed flux
    work.csurf0[k] = c0[m - 1];
    work.beta[k] = (-cs[m - 1] + dr / (2.0 * D)) / ctx_.F;
  }
}

double CellSolver::reaction_current(std::size_t k, double phi_s, double phi_e, double c_e,
                                    const StepWork &work) const {
  const double ce = std::max(c_e, 0.0);
  if (ce <= 0.0)
    return 0.0; // depleted electrolyte shuts the reaction down

  const double cmax = c_s_max_[k];
  const double beta = work.beta[k];
  const double csurf0 = work.csurf0[k];
  const double z = ctx_.half_arg();
  const double Fk = ctx_.F * k_rate_[k] * std::sqrt(ce);
  const OcpCurve &ocp = *ocp_[k];

  const double cs_lo = kCsMargin * cmax;
  const double cs_hi = (1.0 - kCsMargin) * cmax;
  double j_lo = (csurf0 - cs_hi) / beta; // most negative admissible current
  double j_hi = (csurf0 - cs_lo) / beta;

  auto eval = [&](double J, double *dg) {
    const double cs = csurf0 - beta * J;
    const double x = cs / cmax;
    const double U = ocp.value_extended(x);
    const double eta = phi_s - phi_e - U;
    const double j0 = Fk * std::sqrt(std::max(cs * (cmax - cs), 0.0));
    const double sh = guarded_sinh(z * eta);
    const double g = J - 2.0 * j0 * sh;
    if (dg) {
      const double dU_dcs = ocp.slope_extended(x) / cmax;
      const double deta_dJ = dU_dcs * beta; // <= 0 for decreasing OCP
      double dj0_dcs = 0.0;
      const double prod = cs * (cmax - cs);
      if (prod > 0.0)
        dj0_dcs = Fk * (cmax - 2.0 * cs) / (2.0 * std::sqrt(prod));
      const double ch = guarded_cosh(z * eta);
      *dg = 1.0 - 2.0 * (dj0_dcs * (-beta) * sh + j0 * ch * z * deta_dJ);
    }
    return g;
  };

  // g is monotone increasing in J; bracket then safeguarded Newton
  double g_lo = eval(j_lo, nullptr);
  double g_hi = eval(j_hi, nullptr);
  if (g_lo >= 0.0)
    return j_lo;
  if (g_hi <= 0.0)
    return j_hi;

  double J = std::clamp(work.j_warm[k], j_lo, j_hi);
  for (int it = 0; it < 80; ++it) {
    double dg = 1.0;
    const double g = eval(J, &dg);
    if (std::abs(g) <= 1e-11 * (1.0 + std::abs(J)))
      break;
    if (g > 0.0)
      j_hi = J;
    else
      j_lo = J;
    double Jn = J - g / dg;
    if (!std::isfinite(Jn) || Jn <= j_lo || Jn >= j_hi)
      Jn = 0.5 * (j_lo + j_hi);
    if (std::abs(Jn - J) <= 1e-14 * (1.0 + std::abs(J))) {
      J = Jn;
      break;
    }
    J = Jn;
  }
  work.j_warm[k] = J;
  return J;
}

void CellSolver::assemble_residual(const std::vector<double> &u, const CellState &old_state,
                                   const StepWork &work, std::vector<double> &R,
                                   std::vector<double> *j_out) const {
  const std::size_t n = mesh_.node_count();
  const double tp = design_.electrolyte.t_plus;
  const double F = ctx_.F;
  const double T = ctx_.T;
  const double i_app = work.i_app;
  const double dt = work.dt;
  const double two_rt_f = 2.0 * ctx_.thermal_voltage();

  R.assign(n_unknowns_, 0.0);

  // node-centered transport coefficients
  static thread_local std::vector<double> d_eff, kap_eff, cl;
  d_eff.resize(n);
  kap_eff.resize(n);
  cl.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cl[i] = std::max(u[iu_ce_[i]], kCePropFloor);
    d_eff[i] = design_.electrolyte.D_e_bulk(cl[i], T) * brug_pow_[i];
    kap_eff[i] = design_.electrolyte.kappa_e_bulk(cl[i], T) * brug_pow_[i];
  }

  // reaction current density per electrode node
  static thread_local std::vector<double> jn;
  jn.assign(mesh_.electrode_node_count(), 0.0);
  for (std::size_t k = 0; k < mesh_.electrode_node_count(); ++k) {
    const std::size_t node = mesh_.electrode_nodes[k];
    jn[k] = reaction_current(k, u[iu_ps_[node]], u[iu_pe_[node]], u[iu_ce_[node]], work);
  }
  if (j_out)
    *j_out = jn;

  // electrolyte face fluxes: G = D_eff dc/dx, IE = ionic current density
  static thread_local std::vector<double> G, IE;
  G.assign(n + 1, 0.0);
  IE.assign(n + 1, 0.0);

  // counter-electrode face: imposed diffusive flux and Butler-Volmer Dirichlet
  // value for phi_e (Li metal at zero potential is the reference). The
  // exchange current scales with sqrt(c_e) at the Li surface, so electrolyte
  // depletion at the counter electrode drives the overpotential up sharply.
  G[0] = (1.0 - tp) * i_app / F;
  const double half0 = mesh_.dx[0] / 2.0;
  const double c_face0 =
      std::max(cl[0] - (G[0] / d_eff[0]) * half0, kCePropFloor);
  const double j0_face =
      design_.j0_ce * std::sqrt(c_face0 / design_.electrolyte.c_e0);
  const double phi_face0 = two_rt_f * std::asinh(i_app / (2.0 * j0_face));
  {
    const double act0 = design_.electrolyte.activity_factor(cl[0], T);
    const double coef0 = two_rt_f * (1.0 - tp) * act0;
    IE[0] = -kap_eff[0] * (u[iu_pe_[0]] - phi_face0) / half0 +
            kap_eff[0] * coef0 * (G[0] / d_eff[0]) / cl[0];
  }

  for (std::size_t f = 1; f < n; ++f) {
    const std::size_t L = f - 1, Rn = f;
    const double wL = mesh_.dx[L] / 2.0, wR = mesh_.dx[Rn] / 2.0;
    const double h = wL + wR;
    const double Df = harmonic_face(wL, d_eff[L], wR, d_eff[Rn]);
    const double Kf = harmonic_face(wL, kap_eff[L], wR, kap_eff[Rn]);
    G[f] = Df * (u[iu_ce_[Rn]] - u[iu_ce_[L]]) / h;
    const double cbar = 0.5 * (cl[L] + cl[Rn]);
    const double coef = two_rt_f * (1.0 - tp) * design_.electrolyte.activity_factor(cbar, T);
    IE[f] = -Kf * (u[iu_pe_[Rn]] - u[iu_pe_[L]]) / h +
            Kf * coef * (std::log(cl[Rn]) - std::log(cl[L])) / h;
  }
  // current collector face: no species or ionic flux

  // solid-phase face currents over the contiguous electrode block
  const std::size_t first_el = mesh_.electrode_nodes.empty() ? n : mesh_.electrode_nodes.front();
  static thread_local std::vector<double> P;
  P.assign(n + 1, 0.0);
  for (std::size_t f = first_el + 1; f < n; ++f) {
    const std::size_t L = f - 1, Rn = f;
    const double wL = mesh_.dx[L] / 2.0, wR = mesh_.dx[Rn] / 2.0;
    const double Sf = harmonic_face(wL, sigma_eff_[L], wR, sigma_eff_[Rn]);
    P[f] = Sf * (u[iu_ps_[Rn]] - u[iu_ps_[L]]) / (wL + wR);
  }
  P[n] = i_app; // sigma dphi_s/dx at the current collector

  for (std::size_t i = 0; i < n; ++i) {
    const double dx = mesh_.dx[i];
    const int k = mesh_.electrode_index[i];
    const double aJ = k >= 0 ? a_p_[i] * jn[k] : 0.0;

    R[iu_ce_[i]] = eps_e_[i] * dx * (u[iu_ce_[i]] - old_state.c_e[i]) / dt -
                   (G[i + 1] - G[i]) - aJ * (1.0 - tp) / F * dx;
    R[iu_pe_[i]] = (IE[i + 1] - IE[i]) - aJ * dx;
    if (k >= 0)
      R[iu_ps_[i]] = (P[i + 1] - P[i]) - aJ * dx;
  }
}

CellSolver::StepOutcome CellSolver::step(const CellState &old_state, double i_app, double dt) const {
  StepOutcome out;
  out.state = old_state;

  StepWork work;
  work.i_app = i_app;
  precompute_radial(old_state, dt, work);

  std::vector<double> u;
  pack(old_state, u);

  const double w_p = std::abs(i_app) + 1.0;       // [A/m^2]
  const double w_c = w_p / ctx_.F;                // [mol/m^2/s]

  std::vector<double> R(n_unknowns_), Rp(n_unknowns_), du, up;
  const int kl = band_, ku = band_;
  BandedMatrix jac(n_unknowns_, kl, ku);

  auto scaled_worst = [&](const std::vector<double> &Rv, bool &finite) {
    double worst = 0.0;
    finite = true;
    for (std::size_t i = 0; i < mesh_.node_count(); ++i) {
      if (!std::isfinite(Rv[iu_ce_[i]]) || !std::isfinite(Rv[iu_pe_[i]])) finite = false;
      worst = std::max(worst, std::abs(Rv[iu_ce_[i]]) / w_c);
      worst = std::max(worst, std::abs(Rv[iu_pe_[i]]) / w_p);
      if (iu_ps_[i] >= 0) {
        if (!std::isfinite(Rv[iu_ps_[i]])) finite = false;
        worst = std::max(worst, std::abs(Rv[iu_ps_[i]]) / w_p);
      }
    }
    return worst;
  };

  bool converged = false;
  int it = 0;
  for (; it < config_.max_newton_iters; ++it) {
    assemble_residual(u, old_state, work, R, nullptr);

    bool finite = true;
    const double worst = scaled_worst(R, finite);
    if (std::getenv("MDFN_DEBUG_NEWTON")) {
      int wi = -1;
      double wv = 0.0;
      for (int r = 0; r < n_unknowns_; ++r)
        if (std::abs(R[r]) > wv) {
          wv = std::abs(R[r]);
          wi = r;
        }
      std::fprintf(stderr, "  newton it=%d worst=%.3e worst_raw=%.3e at u[%d]\n", it,
                   worst, wv, wi);
    }
    if (!finite)
      break;
    if (worst < config_.newton_tol) {
      converged = true;
      break;
    }

    // banded Jacobian by finite differences with column coloring: columns a
    // full bandwidth apart perturb together without row overlap
    jac.zero();
    const int stride = kl + ku + 1;
    for (int color = 0; color < stride; ++color) {
      up = u;
      for (int col = color; col < n_unknowns_; col += stride)
        up[col] += fd_step_[col];
      assemble_residual(up, old_state, work, Rp, nullptr);
      for (int col = color; col < n_unknowns_; col += stride) {
        const int r_lo = std::max(0, col - ku);
        const int r_hi = std::min(n_unknowns_ - 1, col + kl);
        for (int r = r_lo; r <= r_hi; ++r)
          jac.at(r, col) = (Rp[r] - R[r]) / fd_step_[col];
      }
    }

    du = R;
    for (auto &v : du)
      v = -v;
    if (!jac.solve(du))
      break;

    // damped update: keep concentrations positive, potentials bounded
    double alpha = 1.0;
    for (std::size_t i = 0; i < mesh_.node_count(); ++i) {
      const int c = iu_ce_[i];
      if (du[c] < 0.0) {
        const double room = u[c] - kCeFloor;
        if (room <= 0.0)
          continue;
        alpha = std::min(alpha, 0.95 * room / (-du[c]));
      }
    }
    double max_dphi = 0.0;
    for (std::size_t i = 0; i < mesh_.node_count(); ++i) {
      max_dphi = std::max(max_dphi, std::abs(du[iu_pe_[i]]));
      if (iu_ps_[i] >= 0)
        max_dphi = std::max(max_dphi, std::abs(du[iu_ps_[i]]));
    }
    if (max_dphi > 2.0)
      alpha = std::min(alpha, 2.0 / max_dphi);

    // backtracking line search: reject steps that inflate the residual so the
    // iteration cannot fall into a two-cycle across a constitutive-law corner
    double best_alpha = alpha, best_worst = std::numeric_limits<double>::infinity();
    bool improved = false;
    for (int ls = 0; ls < 8; ++ls) {
      up = u;
      for (int kidx = 0; kidx < n_unknowns_; ++kidx)
        up[kidx] += alpha * du[kidx];
      assemble_residual(up, old_state, work, Rp, nullptr);
      bool fin = true;
      const double w = scaled_worst(Rp, fin);
      if (fin && w < worst) {
        improved = true;
        best_alpha = alpha;
        break;
      }
      if (fin && w < best_worst) {
        best_worst = w;
        best_alpha = alpha;
      }
      alpha *= 0.5;
    }
    if (!improved && worst < 1e3 * config_.newton_tol) {
      // stagnation at the finite-difference noise floor: the residual is
      // already orders of magnitude below the applied current scale
      converged = true;
      break;
    }
    // otherwise the least-bad probed step is still taken to keep moving
    for (int kidx = 0; kidx < n_unknowns_; ++kidx)
      u[kidx] += best_alpha * du[kidx];
  }

  out.iterations = it;
  out.converged = converged;
  if (!converged)
    return out;

  // final residual pass fixes the reaction currents consistent with u
  std::vector<double> j_final;
  assemble_residual(u, old_state, work, R, &j_final);

  unpack(u, out.state);
  const int m = mesh_.radial_shells;
  for (std::size_t k = 0; k < mesh_.electrode_node_count(); ++k) {
    const double q = j_final[k] / ctx_.F;
    for (int j = 0; j < m; ++j)
      out.state.c_s[k * m + j] = work.c0[k * m + j] + q * work.csens[k * m + j];
  }
  out.state.j_rxn = j_final;
  out.state.time = old_state.time + dt;
  return out;
}

double CellSolver::voltage(const CellState &state, double i_app) const {
  const std::size_t last = mesh_.node_count() - 1;
  const int k = mesh_.electrode_index[last];
  if (k < 0)
    throw StateError("voltage: no electrode adjacent to the current collector");
  const double phi_cc = state.phi_s[k] + i_app * (mesh_.dx[last] / 2.0) / sigma_eff_[last];
  return phi_cc + i_app * design_.R_contact;
}

double CellSolver::ce_at_counter_electrode(const CellState &state, double i_app) const {
  // Half-cell extrapolation to the lithium-foil surface: the plating reaction
  // consumes a (1 - t+) share of the applied current, so the concentration
  // falls below the first node center by the flux times half a cell width.
  const double G0 = (1.0 - design_.electrolyte.t_plus) * i_app / ctx_.F;
  const double c0 = std::max(state.c_e[0], kCePropFloor);
  const double d0 = design_.electrolyte.D_e_bulk(c0, ctx_.T) * brug_pow_[0];
  return c0 - (G0 / d0) * (mesh_.dx[0] / 2.0);
}

double CellSolver::min_ce(const CellState &state, std::size_t *node) const {
  std::size_t arg = 0;
  double best = state.c_e[0];
  for (std::size_t i = 1; i < state.c_e.size(); ++i)
    if (state.c_e[i] < best) {
      best = state.c_e[i];
      arg = i;
    }
  if (node)
    *node = arg;
  return best;
}

} // namespace mdfn
