#pragma once

#include "mdfn/metrics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mdfn {

/// Per-layer parameter overrides for one sweep case. Indices align with
/// CellDesign::layers; untouched fields keep the base value.
struct LayerOverride {
  std::optional<double> L_um;
  std::optional<double> eps_e;
  std::optional<double> eps_cbd;
  std::optional<double> b;

  bool operator==(const LayerOverride &) const = default;
};

struct CaseOverride {
  std::string id;
  std::vector<LayerOverride> layers;

  bool operator==(const CaseOverride &) const = default;
};

/// One evaluated sweep row.
struct SweepCase {
  std::string id;
  CellDesign design;
  double i_1c_mA = 0.0;
  double specific_capacity_mAh_cm2 = 0.0;
  double capacity_mAh_cm2 = 0.0;
  double retention = 0.0;
  double cathode_mass_g = 0.0;
  bool failed = false;
  std::string note;
};

/// Search space for the staged optimizer: explicit candidate grids per
/// parameter family plus hard porosity bounds and a relative excursion window
/// around the base design's porosities.
struct DesignSpace {
  CellDesign base;
  double eps_e_lo = 0.25;  //!< hard lower porosity bound
  double eps_e_hi = 0.35;  //!< hard upper porosity bound (rejected above)
  double porosity_window = 0.15; //!< max relative porosity excursion from base
  std::vector<double> eps_e_grid = {0.25, 0.263, 0.30, 0.31, 0.34};
  std::vector<double> eps_cbd_grid = {0.04, 0.07, 0.11, 0.20};
  std::vector<double> b_grid = {1.6, 1.7, 1.8, 1.9, 2.1};
  std::vector<double> total_thickness_grid_um = {60, 88, 104, 112, 140, 150};
  std::vector<double> nmc_fraction_grid = {0.096, 0.398, 0.457, 0.50, 0.515, 0.662, 0.903};
  std::optional<double> equalization_target_mAh_cm2;
  bool optimize_microstructure = true;
  bool optimize_thickness = true;
  bool optimize_ratio = true;
};

/// Nameplate re-rating rule: rated areal capacity density [mAh/cm^2/um] of a
/// layer after a carbon-binder-fraction change, interpolating linearly
/// between the measured default and reduced-binder anchor points (clamped).
double rerated_density(bool is_nmc, double eps_cbd);

/// Scales the selected electrode layer thickness (layer_index < 0: all
/// electrode layers proportionally) until the 0.05C reference capacity
/// matches the target within 0.5%, seeding from the nameplate ratio and
/// falling back to bisection. Evaluations are cached by design fingerprint.
CellDesign equalize_specific_capacity(const CellDesign &design, double target_mAh_cm2,
                                      int layer_index, const SolverConfig &config);

/// Applies each case override to the base design (re-rating layers whose
/// binder fraction changed), equalizes when the space has a target, then
/// simulates a cc charge at c_rate. Rows keep the input order; per-case
/// failures are recorded without aborting the sweep.
std::vector<SweepCase> sensitivity_sweep(const DesignSpace &space,
                                         const std::vector<CaseOverride> &cases,
                                         double c_rate, const SolverConfig &config,
                                         unsigned threads = 0);

/// Equal-sublayer (50:50) bilayer thickness scan at fixed microstructure.
std::vector<SweepCase> thickness_sweep(const CellDesign &design,
                                       const std::vector<double> &totals_um,
                                       double c_rate, const SolverConfig &config,
                                       unsigned threads = 0);

/// Sub-layer ratio scan: for each NMC thickness fraction, chooses the
/// (L_nmc, L_lfp) pair whose nameplate capacity matches the target, then
/// simulates at c_rate.
std::vector<SweepCase> ratio_sweep(const CellDesign &design,
                                   const std::vector<double> &nmc_fractions,
                                   double target_mAh_cm2, double c_rate,
                                   const SolverConfig &config, unsigned threads = 0);

/// Evaluates the given designs and reports capacity keyed by cathode mass.
std::vector<SweepCase> mass_sweep(const std::vector<CellDesign> &designs, double c_rate,
                                  const SolverConfig &config, unsigned threads = 0);

/// Index of the best row by achieved capacity; ties prefer higher retention,
/// then thinner electrode. Failed rows never win.
std::size_t best_by_capacity(const std::vector<SweepCase> &rows);
/// Index of the best row by retention; ties prefer higher capacity, then
/// thinner electrode.
std::size_t best_by_retention(const std::vector<SweepCase> &rows);

struct OptimizeResult {
  CellDesign best;
  DesignMetrics metrics;
  std::vector<SweepCase> trace;
  std::vector<std::string> warnings;
};

/// Staged deterministic coordinate search: (1) per-parameter microstructure
/// grids at equalized reference capacity, accepting retention-improving
/// moves; (2) total-thickness grid at 50:50 ratio; (3) sub-layer ratio grid
/// at the incumbent's reference capacity. Returns the best design, its
/// metrics, and the full evaluation trace.
OptimizeResult optimize(const DesignSpace &space, double c_rate,
                        const SolverConfig &config, unsigned threads = 0);

} // namespace mdfn
