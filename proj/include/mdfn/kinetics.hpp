#pragma once

#include "mdfn/constants.hpp"

namespace mdfn {

/// Reaction surface area per electrode volume, a = 3 eps_s / R_p, where the
/// solid fraction is the complement of electrolyte and carbon-binder fractions.
double specific_surface_area(double eps_e, double eps_cbd, double R_p);

/// Bruggeman correction: effective = bulk * eps^b.
double effective_transport(double bulk_value, double eps, double b);

/// J0 = F k sqrt(c_e) sqrt(c_surf) sqrt(c_s_max - c_surf) [A/m^2].
/// Zero whenever any factor vanishes.
double exchange_current_density(double k, double c_e, double c_surf, double c_s_max,
                                const KineticsContext &ctx);

/// Symmetric Butler-Volmer: J = 2 J0 sinh(F eta / (2 R T)). Overflow-guarded.
double butler_volmer(double J0, double eta, const KineticsContext &ctx);

/// sinh with the asymptotic exponential form for large arguments and a cap
/// that keeps extreme Newton probes finite.
double guarded_sinh(double a);
double guarded_cosh(double a);

} // namespace mdfn
