#pragma once

#include "mdfn/ocp.hpp"

#include <string>

namespace mdfn {

/// Active-material properties of one chemistry.
struct ChemistrySpec {
  std::string name;
  double c_s_max = 0.0;   //!< maximum Li concentration in the solid [mol/m^3]
  double D_s = 0.0;       //!< solid diffusivity [m^2/s]
  double k_rate = 0.0;    //!< reaction rate constant [m^2.5 s^-1 mol^-0.5]
  double R_p = 0.0;       //!< representative particle radius [m]
  OcpCurve ocp = OcpCurve::lfp();

  void validate() const;

  /// NMC622 as characterized for the bilayer cathode (sub-layer p1).
  static ChemistrySpec nmc622();
  /// LFP as characterized for the bilayer cathode (sub-layer p2).
  static ChemistrySpec lfp();
};

} // namespace mdfn
