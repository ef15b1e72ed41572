#pragma once

#include "mdfn/protocol.hpp"

#include <utility>
#include <vector>

namespace mdfn {

/// Headline figures of merit for one design at one C-rate.
struct DesignMetrics {
  double specific_capacity_mAh_cm2 = 0.0; //!< 0.05C reference capacity
  double achieved_capacity_mAh_cm2 = 0.0; //!< capacity at the probed C-rate
  double retention = 0.0;                 //!< achieved / specific, in [0, 1+]
  double energy_density_Wh_g = 0.0;
  double cathode_mass_g = 0.0;
  double time_to_cutoff_min = 0.0;
  double soc_at_cutoff = 0.0;             //!< achieved / specific
};

/// Reference capacity [mAh/cm^2]: a 0.05C charge from charge initialization
/// to the upper cutoff, capped at the nominal 20 h rated duration. For the
/// built-in designs this reproduces the nameplate rated capacity.
double specific_capacity(const CellDesign &design, const SolverConfig &config);

/// Achieved capacity divided by the 0.05C reference capacity.
double capacity_retention(double achieved_mAh_cm2, double specific_mAh_cm2);

/// Normalized reaction current density J̄ = J L a_p / I: unity everywhere for
/// a homogeneously utilized electrode carrying the applied current density I.
double normalized_reaction_current(double J_A_m2, double L_m, double a_p_per_m,
                                   double I_A_m2);

/// Mass energy density [Wh/g]: (|I| / m) ∫ V dt with trapezoidal quadrature
/// over the recorded series of one constant-current segment.
double energy_density_Wh_per_g(const SimulationResult &result, double mass_g);

/// One row of a C-rate performance curve.
struct CrateEntry {
  double c_rate = 0.0;
  double capacity_mAh_cm2 = 0.0;
  double normalized = 0.0; //!< capacity / capacity at the 0.5C anchor
};

/// Charges the design once per rate from identical initial state and
/// normalizes against the 0.5C entry (which must be present). Simulations
/// fan out to `threads` workers; results keep the input rate order.
std::vector<CrateEntry> crate_curve(const CellDesign &design,
                                    const std::vector<double> &rates,
                                    const SolverConfig &config, unsigned threads = 0);

/// Elapsed minutes of a completed charge segment and the state of charge
/// (achieved / specific) it reached.
std::pair<double, double> time_and_soc_at_cutoff(const SimulationResult &result,
                                                 double specific_mAh_cm2);

/// Convenience: run the 0.05C reference and a single cc charge at `c_rate`
/// and assemble the headline metrics.
DesignMetrics evaluate_design(const CellDesign &design, double c_rate,
                              const SolverConfig &config);

} // namespace mdfn
