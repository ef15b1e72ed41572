#include "mdfn/design.hpp"

#include "mdfn/errors.hpp"

#include <cmath>

namespace mdfn {

void LayerSpec::validate() const {
  if (!(L > 0.0))
    throw ConfigError("layer: thickness must be positive");
  if (!(eps_e > 0.0 && eps_e < 1.0))
    throw ConfigError("layer: electrolyte volume fraction must lie in (0, 1)");
  if (!(b >= 1.0))
    throw ConfigError("layer: Bruggeman factor must be >= 1");
  if (is_electrode()) {
    chemistry->validate();
    if (!(eps_e + eps_cbd < 1.0))
      throw ConfigError("layer: eps_e + eps_cbd must leave a positive solid fraction");
    if (!(sigma_s > 0.0))
      throw ConfigError("layer: solid conductivity must be positive");
    const double cmax = chemistry->c_s_max;
    if (c_s_init_charge < 0.0 || c_s_init_charge > cmax ||
        c_s_init_discharge < 0.0 || c_s_init_discharge > cmax)
      throw ConfigError("layer: initial particle concentration outside [0, c_s_max]");
  } else {
    if (eps_cbd != 0.0)
      throw ConfigError("separator: carbon binder fraction must be zero");
  }
}

void CellDesign::validate() const {
  if (layers.size() < 2)
    throw ConfigError("design: need a separator and at least one electrode layer");
  if (layers.front().is_electrode())
    throw ConfigError("design: first layer must be the separator (adjacent to the counter electrode)");
  for (std::size_t i = 1; i < layers.size(); ++i)
    if (!layers[i].is_electrode())
      throw ConfigError("design: separator must appear exactly once, first");
  for (const auto &l : layers)
    l.validate();
  electrolyte.validate();
  if (!(area > 0.0))
    throw ConfigError("design: area must be positive");
  if (!(cutoff_lower < cutoff_upper))
    throw ConfigError("design: cutoff_lower must be below cutoff_upper");
  if (!(j0_ce > 0.0))
    throw ConfigError("design: counter-electrode exchange current density must be positive");
  if (!(R_contact >= 0.0))
    throw ConfigError("design: contact resistance must be non-negative");
}

double CellDesign::electrode_thickness() const {
  double L = 0.0;
  for (const auto &l : layers)
    if (l.is_electrode())
      L += l.L;
  return L;
}

double CellDesign::total_thickness() const {
  double L = 0.0;
  for (const auto &l : layers)
    L += l.L;
  return L;
}

double CellDesign::cathode_mass_g() const {
  if (mass_override_g)
    return *mass_override_g;
  double m = 0.0; // kg
  for (const auto &l : layers)
    if (l.is_electrode())
      m += (l.eps_solid() * l.rho_am + l.eps_cbd * rho_cbd) * l.L * area;
  return m * 1e3;
}

double CellDesign::theoretical_capacity_mAh_cm2() const {
  constexpr double F = 96485.33;
  double q = 0.0; // A s / m^2
  for (const auto &l : layers)
    if (l.is_electrode())
      q += F * l.eps_solid() * l.L * std::abs(l.c_s_init_charge - l.c_s_init_discharge);
  return q / 3600.0 * 0.1; // Ah/m^2 -> mAh/cm^2
}

double CellDesign::rated_capacity_mAh_cm2() const {
  double q = 0.0;
  for (const auto &l : layers)
    if (l.is_electrode())
      q += l.rated_mAh_cm2_per_um * l.L * 1e6;
  return q;
}

double CellDesign::i_1c_A() const {
  // rated capacity [mAh/cm^2] x area [cm^2] x 1e-3 -> A for a one-hour rate
  return rated_capacity_mAh_cm2() * (area * 1e4) * 1e-3;
}

namespace {

LayerSpec make_separator() {
  LayerSpec s;
  s.L = 16e-6;
  s.eps_e = 0.45;
  s.b = 1.5;
  s.eps_cbd = 0.0;
  s.sigma_s = 0.0;
  return s;
}

LayerSpec make_nmc_layer(double L, double eps_e, double eps_cbd, double b, double rated) {
  LayerSpec p;
  p.chemistry = ChemistrySpec::nmc622();
  p.L = L;
  p.eps_e = eps_e;
  p.eps_cbd = eps_cbd;
  p.b = b;
  p.sigma_s = 5.0;
  p.c_s_init_charge = 44868.0;
  p.c_s_init_discharge = 13366.0;
  p.rho_am = 4600.0;
  p.rated_mAh_cm2_per_um = rated;
  return p;
}

LayerSpec make_lfp_layer(double L, double eps_e, double eps_cbd, double b, double rated) {
  LayerSpec p;
  p.chemistry = ChemistrySpec::lfp();
  p.L = L;
  p.eps_e = eps_e;
  p.eps_cbd = eps_cbd;
  p.b = b;
  p.sigma_s = 5.0;
  p.c_s_init_charge = 22751.0;
  p.c_s_init_discharge = 29.0;
  p.rho_am = 3400.0;
  p.rated_mAh_cm2_per_um = rated;
  return p;
}

CellDesign base_cell() {
  CellDesign d;
  d.electrolyte = ElectrolyteSpec::lipf6_valoen_reimers();
  d.area = 1.54e-4;
  d.R_contact = 1.5e-3;
  d.j0_ce = 200.0;
  d.cutoff_upper = 4.2;
  d.cutoff_lower = 3.0;
  return d;
}

} // namespace

CellDesign CellDesign::default_bilayer() {
  CellDesign d = base_cell();
  d.name = "default-bilayer";
  d.layers.push_back(make_separator());
  d.layers.push_back(make_nmc_layer(44e-6, 0.31, 0.11, 1.6, rated_density::nmc_default));
  d.layers.push_back(make_lfp_layer(44e-6, 0.263, 0.11, 2.1, rated_density::lfp_default));
  return d;
}

CellDesign CellDesign::optimal_bilayer() {
  CellDesign d = base_cell();
  d.name = "optimal-bilayer";
  d.layers.push_back(make_separator());
  d.layers.push_back(make_nmc_layer(47e-6, 0.30, 0.04, 1.6, rated_density::nmc_low_cbd));
  d.layers.push_back(make_lfp_layer(71e-6, 0.30, 0.07, 1.8, rated_density::lfp_low_cbd));
  return d;
}

CellDesign CellDesign::nmc_only(double L_m, double eps_e, double eps_cbd, double b,
                                double rated_per_um) {
  CellDesign d = base_cell();
  d.name = "nmc-only";
  d.layers.push_back(make_separator());
  d.layers.push_back(make_nmc_layer(L_m, eps_e, eps_cbd, b, rated_per_um));
  return d;
}

CellDesign CellDesign::lfp_only(double L_m, double eps_e, double eps_cbd, double b,
                                double rated_per_um) {
  CellDesign d = base_cell();
  d.name = "lfp-only";
  d.layers.push_back(make_separator());
  d.layers.push_back(make_lfp_layer(L_m, eps_e, eps_cbd, b, rated_per_um));
  return d;
}

CellDesign CellDesign::preset(const std::string &name) {
  if (name == "default-bilayer")
    return default_bilayer();
  if (name == "optimal-bilayer")
    return optimal_bilayer();
  // Conventional single-chemistry electrodes: thickness equalizes the rated
  // capacity with the corresponding bilayer; the reference-cell solid fractions
  // (0.615 NMC, 0.5435 LFP) are consistent with the rated capacity densities.
  if (name == "nmc-only-72um") {
    auto d = nmc_only(72e-6, 0.275, 0.11, 1.6, rated_density::nmc_default);
    d.name = name;
    return d;
  }
  if (name == "lfp-only-113um") {
    auto d = lfp_only(113e-6, 0.318, 0.1385, 2.1, rated_density::lfp_default);
    d.name = name;
    return d;
  }
  // Thicker conventional electrodes re-equalized against the optimal bilayer,
  // carrying the optimized microstructure (porosity 0.30, reduced CBD).
  if (name == "nmc-only-89.2um") {
    auto d = nmc_only(89.2e-6, 0.30, 0.04, 1.6, rated_density::nmc_low_cbd);
    d.name = name;
    return d;
  }
  if (name == "lfp-only-149.5um") {
    auto d = lfp_only(149.5e-6, 0.30, 0.07, 1.8, rated_density::lfp_low_cbd);
    d.name = name;
    return d;
  }
  throw ConfigError("unknown design preset '" + name + "'");
}

std::vector<std::string> CellDesign::preset_names() {
  return {"default-bilayer", "optimal-bilayer", "nmc-only-72um",
          "lfp-only-113um", "nmc-only-89.2um", "lfp-only-149.5um"};
}

} // namespace mdfn
