#pragma once

#include "mdfn/chemistry.hpp"
#include "mdfn/electrolyte.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mdfn {

/// One homogeneous region of the cell: the separator (no chemistry) or an
/// electrode sub-layer.
struct LayerSpec {
  std::optional<ChemistrySpec> chemistry; //!< absent for the separator
  double L = 0.0;            //!< thickness [m]
  double eps_e = 0.0;        //!< electrolyte volume fraction [-]
  double eps_cbd = 0.0;      //!< carbon binder domain volume fraction [-]
  double b = 1.5;            //!< Bruggeman tortuosity factor [-]
  double sigma_s = 5.0;      //!< solid electronic conductivity [S/m]
  double c_s_init_charge = 0.0;    //!< initial particle concentration, charge [mol/m^3]
  double c_s_init_discharge = 0.0; //!< initial particle concentration, discharge [mol/m^3]
  double rho_am = 0.0;       //!< active material density [kg/m^3], for cathode mass
  /// Rated (experiment-anchored) areal capacity per micrometre of this layer
  /// [mAh/cm^2/um]. The rated capacity of a design, sum of rated density x
  /// thickness over its electrode layers, defines its 1C current and the
  /// nominal duration of the 0.05C capacity test. Zero for the separator.
  double rated_mAh_cm2_per_um = 0.0;

  bool is_electrode() const { return chemistry.has_value(); }
  double eps_solid() const { return 1.0 - eps_e - eps_cbd; }
  void validate() const;
};

/// Full description of one half-cell design: separator first, then electrode
/// sub-layers ordered from the separator toward the current collector.
struct CellDesign {
  std::string name;
  std::vector<LayerSpec> layers;
  ElectrolyteSpec electrolyte;
  double area = 1.54e-4;      //!< cross-sectional area [m^2]
  double R_contact = 1.5e-3;  //!< contact resistance [Ohm m^2]
  double j0_ce = 10.0;        //!< Li-metal counter-electrode exchange current density [A/m^2]
  double cutoff_upper = 4.2;  //!< charge cutoff [V]
  double cutoff_lower = 3.0;  //!< discharge cutoff [V]
  double rho_cbd = 1550.0;    //!< carbon binder domain density [kg/m^3]
  std::optional<double> mass_override_g; //!< configured cathode mass [g], if pinned

  void validate() const;

  std::size_t electrode_layer_count() const { return layers.size() - 1; }
  double electrode_thickness() const;
  double total_thickness() const;

  /// Cathode mass [g]: active material plus carbon binder over all sub-layers,
  /// unless an explicit mass override is configured.
  double cathode_mass_g() const;

  /// Areal capacity [mAh/cm^2] if every sub-layer swept its full admissible
  /// stoichiometry window (upper bound on any constant-current charge).
  double theoretical_capacity_mAh_cm2() const;

  /// Rated areal capacity [mAh/cm^2]: sum of per-layer rated capacity
  /// densities times thickness. This is the nameplate capacity used to define
  /// the 1C current and to equalize designs for benchmark comparisons.
  double rated_capacity_mAh_cm2() const;

  /// Rated 1C current [A] = rated capacity x area.
  double i_1c_A() const;

  // Built-in designs.
  static CellDesign default_bilayer();
  static CellDesign optimal_bilayer();
  static CellDesign nmc_only(double L_m, double eps_e, double eps_cbd, double b,
                             double rated_per_um);
  static CellDesign lfp_only(double L_m, double eps_e, double eps_cbd, double b,
                             double rated_per_um);
  /// Named presets: "default-bilayer", "optimal-bilayer", "nmc-only-72um",
  /// "lfp-only-113um", "nmc-only-89.2um", "lfp-only-149.5um".
  static CellDesign preset(const std::string &name);
  static std::vector<std::string> preset_names();
};

/// Rated areal capacity densities [mAh/cm^2/um], anchored to the measured 1C
/// ratings of the reference cells. The "low-CBD" family is the re-rated
/// candidate design with reduced carbon binder fractions.
namespace rated_density {
inline constexpr double nmc_default = 0.051938;
inline constexpr double lfp_default = 0.033101;
inline constexpr double nmc_low_cbd = 0.052701;
inline constexpr double lfp_low_cbd = 0.031450;
} // namespace rated_density

} // namespace mdfn
