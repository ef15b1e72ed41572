#include "mdfn/chemistry.hpp"

#include "mdfn/errors.hpp"

namespace mdfn {

void ChemistrySpec::validate() const {
  if (!(c_s_max > 0.0))
    throw ConfigError("chemistry '" + name + "': c_s_max must be positive");
  if (!(D_s > 0.0))
    throw ConfigError("chemistry '" + name + "': D_s must be positive");
  if (!(k_rate > 0.0))
    throw ConfigError("chemistry '" + name + "': k_rate must be positive");
  if (!(R_p > 0.0))
    throw ConfigError("chemistry '" + name + "': R_p must be positive");
}

ChemistrySpec ChemistrySpec::nmc622() {
  ChemistrySpec c;
  c.name = "NMC622";
  c.c_s_max = 48700.0;
  c.D_s = 4e-14;
  c.k_rate = 1.0e-10;
  c.R_p = 4.94e-6;
  c.ocp = OcpCurve::nmc622();
  return c;
}

ChemistrySpec ChemistrySpec::lfp() {
  ChemistrySpec c;
  c.name = "LFP";
  c.c_s_max = 22806.0;
  c.D_s = 3e-16;
  c.k_rate = 8.0e-13;
  c.R_p = 0.43e-6;
  c.ocp = OcpCurve::lfp();
  return c;
}

} // namespace mdfn
