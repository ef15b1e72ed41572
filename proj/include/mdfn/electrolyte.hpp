#pragma once

#include <functional>
#include <string>

namespace mdfn {

/// Liquid-electrolyte description. Transport properties are pluggable
/// functions of concentration and temperature so alternative correlations
/// can be swapped in without touching the solver.
struct ElectrolyteSpec {
  std::string correlation = "lipf6-valoen-reimers"; //!< named correlation set
  double c_e0 = 1000.0;  //!< initial salt concentration [mol/m^3]
  double t_plus = 0.37;  //!< cation transference number [-]

  /// bulk diffusivity [m^2/s] as a function of (c_e [mol/m^3], T [K])
  std::function<double(double, double)> D_e_bulk;
  /// bulk ionic conductivity [S/m] as a function of (c_e [mol/m^3], T [K])
  std::function<double(double, double)> kappa_e_bulk;
  /// thermodynamic factor (1 + d ln f / d ln c) [-]
  std::function<double(double, double)> activity_factor;

  void validate() const;

  /// LiPF6 in carbonate solvent, Valoen-Reimers style concentration-dependent
  /// correlations with constant transference number.
  static ElectrolyteSpec lipf6_valoen_reimers();
};

/// Evaluates the three transport properties at one operating point.
/// c_e must be positive; non-positive values are a depletion signal.
struct ElectrolyteProperties {
  double D_e_bulk;
  double kappa_e_bulk;
  double activity_factor;
};
ElectrolyteProperties electrolyte_properties(double c_e, double T, const ElectrolyteSpec &spec);

} // namespace mdfn
