#include "mdfn/kinetics.hpp"

#include "mdfn/errors.hpp"

#include <cmath>

namespace mdfn {

double specific_surface_area(double eps_e, double eps_cbd, double R_p) {
  if (!(R_p > 0.0))
    throw ConfigError("specific_surface_area: particle radius must be positive");
  const double eps_s = 1.0 - eps_e - eps_cbd;
  if (!(eps_s > 0.0))
    throw ConfigError("specific_surface_area: non-positive solid volume fraction");
  return 3.0 * eps_s / R_p;
}

double effective_transport(double bulk_value, double eps, double b) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw ConfigError("effective_transport: volume fraction must lie in (0, 1]");
  if (!(b >= 1.0))
    throw ConfigError("effective_transport: Bruggeman factor must be >= 1");
  return bulk_value * std::pow(eps, b);
}

double exchange_current_density(double k, double c_e, double c_surf, double c_s_max,
                                const KineticsContext &ctx) {
  if (c_surf > c_s_max)
    throw StateError("exchange_current_density: surface concentration exceeds c_s_max");
  if (c_e <= 0.0 || c_surf <= 0.0 || c_surf >= c_s_max)
    return 0.0;
  return ctx.F * k * std::sqrt(c_e * c_surf * (c_s_max - c_surf));
}

double guarded_sinh(double a) {
  const double mag = std::abs(a);
  if (mag <= 30.0)
    return std::sinh(a);
  // asymptotic form in log space; cap well below double overflow
  const double le = std::min(mag, 690.0);
  return std::copysign(0.5 * std::exp(le), a);
}

double guarded_cosh(double a) {
  const double mag = std::abs(a);
  if (mag <= 30.0)
    return std::cosh(a);
  return 0.5 * std::exp(std::min(mag, 690.0));
}

double butler_volmer(double J0, double eta, const KineticsContext &ctx) {
  if (!(J0 >= 0.0))
    throw StateError("butler_volmer: exchange current density must be non-negative");
  return 2.0 * J0 * guarded_sinh(ctx.half_arg() * eta);
}

} // namespace mdfn
