// Acceptance gate: end-to-end checks of the shipped presets and studies
// against their pinned reference values. Prints one PASS/FAIL line per
// criterion and exits nonzero if any criterion fails.
#include "mdfn/design.hpp"
#include "mdfn/kinetics.hpp"
#include "mdfn/metrics.hpp"
#include "mdfn/ocp.hpp"
#include "mdfn/protocol.hpp"
#include "mdfn/simulate.hpp"
#include "mdfn/state.hpp"
#include "mdfn/studio.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

using namespace mdfn;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string &detail) {
  std::printf("criterion %d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  if (!pass)
    ++g_failures;
}

std::string fmt(const char *f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

bool within(double value, double ref, double rel) {
  return std::abs(value - ref) <= rel * ref;
}

SimulationResult run_charge(const CellDesign &d, double c_rate, const SolverConfig &cfg) {
  const Mesh mesh = build_mesh(d, cfg);
  const CellSolver solver(d, mesh, cfg);
  const CellState start = initial_state(d, mesh, Direction::Charge);
  StopCondition stop;
  stop.cutoff_voltage = d.cutoff_upper;
  stop.time_limit_s = 3600.0 / c_rate;
  return simulate_cc(solver, start, c_rate * d.i_1c_A(), stop);
}

} // namespace

int main() {
  SolverConfig cfg;

  // ---- criterion 1: 0.05C specific capacity and runtime ----
  const CellDesign def = CellDesign::preset("default-bilayer");
  const auto t0 = std::chrono::steady_clock::now();
  const SimulationResult ref005 = run_charge(def, 0.05, cfg);
  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double q005 = ref005.capacity_mAh_cm2();
  report(1, within(q005, 3.74, 0.02) && wall_s < 60.0,
         fmt("default bilayer 0.05C: %.4f mAh/cm^2 (target 3.74 +/- 2%%), %.1f s "
             "single-threaded (limit 60 s)",
             q005, wall_s));

  // ---- criterion 2: default designs at 3C ----
  const CellDesign nmc72 = CellDesign::preset("nmc-only-72um");
  const CellDesign lfp113 = CellDesign::preset("lfp-only-113um");
  const SimulationResult r_def3 = run_charge(def, 3.0, cfg);
  const SimulationResult r_nmc3 = run_charge(nmc72, 3.0, cfg);
  const SimulationResult r_lfp3 = run_charge(lfp113, 3.0, cfg);
  const double q_def3 = r_def3.capacity_mAh_cm2();
  const double q_nmc3 = r_nmc3.capacity_mAh_cm2();
  const double q_lfp3 = r_lfp3.capacity_mAh_cm2();
  report(2,
         within(q_def3, 3.19, 0.05) && within(q_nmc3, 2.87, 0.05) &&
             within(q_lfp3, 2.60, 0.05) && q_def3 > q_nmc3 && q_nmc3 > q_lfp3,
         fmt("3C: bilayer %.4f (3.19 +/- 5%%), nmc-72 %.4f (2.87 +/- 5%%), lfp-113 %.4f "
             "(2.60 +/- 5%%), ordering %s",
             q_def3, q_nmc3, q_lfp3,
             (q_def3 > q_nmc3 && q_nmc3 > q_lfp3) ? "ok" : "violated"));

  // ---- criterion 3: candidate-optimal designs at 3C with retentions ----
  const CellDesign opt = CellDesign::preset("optimal-bilayer");
  const CellDesign nmc892 = CellDesign::preset("nmc-only-89.2um");
  const CellDesign lfp1495 = CellDesign::preset("lfp-only-149.5um");
  const SimulationResult r_opt3 = run_charge(opt, 3.0, cfg);
  const double q_opt3 = r_opt3.capacity_mAh_cm2();
  const double q_n892 = run_charge(nmc892, 3.0, cfg).capacity_mAh_cm2();
  const double q_l1495 = run_charge(lfp1495, 3.0, cfg).capacity_mAh_cm2();
  const double s_opt = specific_capacity(opt, cfg);
  const double s_n892 = specific_capacity(nmc892, cfg);
  const double s_l1495 = specific_capacity(lfp1495, cfg);
  const double ret_opt = q_opt3 / s_opt, ret_n892 = q_n892 / s_n892,
               ret_l1495 = q_l1495 / s_l1495;
  const bool caps3 = within(q_opt3, 4.37, 0.05) && within(q_n892, 3.68, 0.05) &&
                     within(q_l1495, 2.46, 0.05);
  const bool rets3 = std::abs(ret_opt - 0.929) <= 0.03 &&
                     std::abs(ret_n892 - 0.784) <= 0.03 &&
                     std::abs(ret_l1495 - 0.523) <= 0.03;
  const bool order3 = q_opt3 > q_n892 && q_n892 > q_l1495;
  report(3, caps3 && rets3 && order3,
         fmt("3C: optimal %.4f/ret %.1f%% (4.37 +/- 5%%, 92.9 +/- 3pp), nmc-89.2 "
             "%.4f/ret %.1f%% (3.68 +/- 5%%, 78.4 +/- 3pp), lfp-149.5 %.4f/ret %.1f%% "
             "(2.46 +/- 5%%, 52.3 +/- 3pp), ordering %s",
             q_opt3, 100 * ret_opt, q_n892, 100 * ret_n892, q_l1495, 100 * ret_l1495,
             order3 ? "ok" : "violated"));

  // ---- criterion 4: optimal bilayer 3C charge time at ~90% state of charge ----
  const double minutes = r_opt3.duration_s() / 60.0;
  const double soc = q_opt3 / s_opt;
  report(4, std::abs(minutes - 18.6) <= 1.0 && soc > 0.85 && soc < 0.98,
         fmt("optimal bilayer 3C cutoff after %.2f min (18.6 +/- 1.0) at %.1f%% SOC "
             "(~90%%)",
             minutes, 100 * soc));

  // ---- criterion 5: thickness sweep argmax at 112 um total ----
  {
    const std::vector<double> grid = {60, 88, 104, 112, 140, 150};
    const auto rows = thickness_sweep(opt, grid, 3.0, cfg, 0);
    const std::size_t best = best_by_capacity(rows);
    std::string caps;
    for (const auto &r : rows)
      caps += fmt("%.0fum=%.3f ", 1e6 * (r.design.layers[1].L + r.design.layers[2].L),
                  r.capacity_mAh_cm2);
    report(5, best < rows.size() && grid[best] == 112.0,
           fmt("capacity argmax %.0f um (expected 112): %s", grid[best], caps.c_str()));
  }

  // ---- criterion 6: ratio sweep argmax at 39.8% NMC ----
  {
    const std::vector<double> fr = {0.096, 0.398, 0.457, 0.50, 0.515, 0.662, 0.903};
    const auto rows = ratio_sweep(opt, fr, opt.rated_capacity_mAh_cm2(), 3.0, cfg, 0);
    const std::size_t best = best_by_retention(rows);
    std::string rets;
    for (std::size_t i = 0; i < rows.size(); ++i)
      rets += fmt("%.1f%%=%.3f ", 100 * fr[i], rows[i].retention);
    report(6, best < rows.size() && fr[best] == 0.398,
           fmt("retention argmax %.1f%% NMC (expected 39.8%%): %s", 100 * fr[best],
               rets.c_str()));
  }

  // ---- criterion 7: cycling protocols ----
  {
    const ProtocolResult slow = run_protocol(def, Protocol::preset("3c-01c-3c"), cfg);
    const auto cs = slow.charge_capacities();
    const bool slow_ok = !slow.failed && cs.size() == 2 &&
                         std::abs(cs[1] - cs[0]) / cs[0] < 0.01;
    const ProtocolResult fast = run_protocol(def, Protocol::preset("3c-x4"), cfg);
    const auto cf = fast.charge_capacities();
    bool fast_ok = !fast.failed && cf.size() == 4;
    if (fast_ok) {
      for (std::size_t i = 2; i < 4; ++i)
        fast_ok = fast_ok && std::abs(cf[i] - cf[1]) / cf[1] < 0.01;
      for (std::size_t i = 1; i < 4; ++i)
        fast_ok = fast_ok && cf[i] < cf[0];
    }
    std::string detail = "3C/0.1C/3C charges:";
    for (double v : cs)
      detail += fmt(" %.4f", v);
    detail += "  3Cx4 charges:";
    for (double v : cf)
      detail += fmt(" %.4f", v);
    report(7, slow_ok && fast_ok, detail + " (equal within 1%; cycles 2-4 below cycle 1)");
  }

  // ---- criterion 8: property suite, zero tolerance violations ----
  {
    bool ok = true;
    std::string notes;

    // lithium conservation over a full 1C charge
    {
      const Mesh mesh = build_mesh(def, cfg);
      const CellSolver solver(def, mesh, cfg);
      const CellState start = initial_state(def, mesh, Direction::Charge);
      StopCondition stop;
      stop.cutoff_voltage = def.cutoff_upper;
      stop.time_limit_s = 3600.0;
      const double I = def.i_1c_A();
      const SimulationResult r = simulate_cc(solver, start, I, stop);
      const double inv0 = lithium_inventory(def, mesh, start);
      const double inv1 = lithium_inventory(def, mesh, r.final_state);
      const double removed = I * r.duration_s() / (solver.context().F * def.area);
      const double rel = std::abs(inv0 - inv1 - removed) / inv0;
      if (rel > 1e-6)
        ok = false;
      notes += fmt("conservation %.2e; ", rel);
    }
    // LFP antisymmetry, bitwise exact where the mirror point is representable
    for (double y : {0.03125, 0.125, 0.25, 0.375, 0.5})
      if (ocp_lfp(y) - 3.413 != -(ocp_lfp(1.0 - y) - 3.413)) {
        ok = false;
        notes += "lfp antisymmetry broken; ";
        break;
      }
    // NMC monotone decreasing
    {
      const OcpCurve u = OcpCurve::nmc622();
      double prev = u.value(0.27);
      for (int i = 1; i <= 650; ++i) {
        const double x = 0.27 + i * 0.65 / 650.0;
        if (u.value(x) >= prev) {
          ok = false;
          notes += "nmc not monotone; ";
          break;
        }
        prev = u.value(x);
      }
    }
    // Butler-Volmer oddness and linearization
    {
      KineticsContext ctx;
      if (butler_volmer(1.3, 0.2, ctx) != -butler_volmer(1.3, -0.2, ctx)) {
        ok = false;
        notes += "bv not odd; ";
      }
      const double eta = 1e-7;
      const double lin = 1.3 * ctx.F * eta / (ctx.R_gas * ctx.T);
      if (std::abs(butler_volmer(1.3, eta, ctx) - lin) > 1e-6 * lin) {
        ok = false;
        notes += "bv linearization off; ";
      }
    }
    // symmetric bilayer degeneracy
    {
      CellDesign split = nmc72;
      split.name = "nmc-split";
      LayerSpec half = nmc72.layers[1];
      half.L /= 2.0;
      split.layers = {nmc72.layers[0], half, half};
      const double q_split = run_charge(split, 3.0, cfg).capacity_mAh_cm2();
      const double rel = std::abs(q_split - q_nmc3) / q_nmc3;
      if (rel > 1e-3)
        ok = false;
      notes += fmt("split-vs-single %.2e; ", rel);
    }
    // grid convergence on the criterion-2 bilayer case
    {
      SolverConfig fine = cfg;
      fine.nodes_per_region = 60;
      fine.radial_shells = 40;
      fine.dt_max = 15.0;
      const double q_fine = run_charge(def, 3.0, fine).capacity_mAh_cm2();
      const double rel = std::abs(q_def3 - q_fine) / q_fine;
      if (rel > 5e-3)
        ok = false;
      notes += fmt("grid refinement %.2e; ", rel);
    }
    // deterministic reruns, bit identical
    {
      const SimulationResult a = run_charge(def, 3.0, cfg);
      const SimulationResult b = run_charge(def, 3.0, cfg);
      const bool same =
          a.V.size() == b.V.size() &&
          std::memcmp(a.V.data(), b.V.data(), a.V.size() * sizeof(double)) == 0 &&
          std::memcmp(a.final_state.c_s.data(), b.final_state.c_s.data(),
                      a.final_state.c_s.size() * sizeof(double)) == 0;
      if (!same) {
        ok = false;
        notes += "rerun not bit-identical; ";
      } else {
        notes += "bit-identical reruns";
      }
    }
    report(8, ok, notes);
  }

  // ---- criterion 9: depletion diagnostic on the lfp-only 113 um 3C run ----
  {
    const Mesh mesh = build_mesh(lfp113, cfg);
    const bool raised = r_lfp3.depletion.has_value();
    const bool before_cutoff =
        raised && r_lfp3.depletion->time < r_lfp3.t.back();
    // the minimum over electrode nodes must sit in the LFP region adjacent to
    // the separator (first quarter of the electrode block)
    const std::size_t first_el = mesh.electrode_nodes.front();
    const std::size_t node = r_lfp3.min_c_e_electrode_node;
    const bool located =
        node >= first_el && node < first_el + mesh.electrode_node_count() / 4;
    report(9, raised && before_cutoff && located,
           fmt("depletion diagnostic %s at t=%.1f s (cutoff at %.1f s), electrode "
               "minimum c_e=%.2f mol/m^3 at node %zu (separator boundary node %zu), "
               "termination %s",
               raised ? "raised" : "not raised", raised ? r_lfp3.depletion->time : -1.0,
               r_lfp3.t.back(), r_lfp3.min_c_e_electrode, node, first_el,
               to_string(r_lfp3.termination)));
  }

  std::printf("%d of 9 criteria passed\n", 9 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
