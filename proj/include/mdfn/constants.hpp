#pragma once

namespace mdfn {

/// Thermodynamic context shared by all kinetic relations.
/// Temperature is held constant over a simulation (isothermal model).
struct KineticsContext {
  double T = 293.15;        //!< absolute temperature [K]
  double F = 96485.33;      //!< Faraday constant [s A/mol]
  double R_gas = 8.314;     //!< universal gas constant [J/K/mol]

  /// F / (2 R T), the argument scale of the symmetric Butler-Volmer relation [1/V]
  double half_arg() const { return F / (2.0 * R_gas * T); }
  /// thermal voltage R T / F [V]
  double thermal_voltage() const { return R_gas * T / F; }
};

} // namespace mdfn
