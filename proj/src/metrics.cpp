#include "mdfn/metrics.hpp"

#include "mdfn/errors.hpp"
#include "mdfn/pool.hpp"
#include "mdfn/state.hpp"

#include <algorithm>
#include <cmath>

namespace mdfn {

namespace {
constexpr double kReferenceCRate = 0.05;
constexpr double kNormalizationAnchorRate = 0.5;

SimulationResult run_cc_charge(const CellDesign &design, double c_rate,
                               const SolverConfig &config) {
  Mesh mesh = build_mesh(design, config);
  CellSolver solver(design, mesh, config);
  CellState s0 = initial_state(design, mesh, Direction::Charge);
  StopCondition stop;
  stop.cutoff_voltage = design.cutoff_upper;
  stop.time_limit_s = 3600.0 / c_rate; // nominal rated duration at this rate
  return simulate_cc(solver, s0, c_rate * design.i_1c_A(), stop);
}
} // namespace

double specific_capacity(const CellDesign &design, const SolverConfig &config) {
  design.validate();
  SimulationResult res = run_cc_charge(design, kReferenceCRate, config);
  if (res.termination == Termination::SolverFailure)
    throw SolverError("specific_capacity: reference charge did not complete");
  return res.capacity_mAh_cm2();
}

double capacity_retention(double achieved_mAh_cm2, double specific_mAh_cm2) {
  if (!(specific_mAh_cm2 > 0.0))
    throw ConfigError("capacity_retention: reference capacity must be positive");
  return achieved_mAh_cm2 / specific_mAh_cm2;
}

double normalized_reaction_current(double J_A_m2, double L_m, double a_p_per_m,
                                   double I_A_m2) {
  if (I_A_m2 == 0.0)
    throw ConfigError("normalized_reaction_current: applied current density is zero");
  return J_A_m2 * L_m * a_p_per_m / I_A_m2;
}

double energy_density_Wh_per_g(const SimulationResult &result, double mass_g) {
  if (!(mass_g > 0.0))
    throw ConfigError("energy_density: mass must be positive");
  if (result.t.size() < 2)
    throw ConfigError("energy_density: result series is empty");
  double integral_Vs = 0.0; // trapezoidal on the adaptive grid
  for (std::size_t i = 1; i < result.t.size(); ++i)
    integral_Vs += 0.5 * (result.V[i] + result.V[i - 1]) * (result.t[i] - result.t[i - 1]);
  const double I = std::abs(result.I.front());
  return I * integral_Vs / 3600.0 / mass_g;
}

std::vector<CrateEntry> crate_curve(const CellDesign &design,
                                    const std::vector<double> &rates,
                                    const SolverConfig &config, unsigned threads) {
  if (rates.empty())
    throw ConfigError("crate_curve: rate list is empty");
  for (double r : rates)
    if (!(r > 0.0))
      throw ConfigError("crate_curve: rates must be positive");
  const auto anchor = std::find_if(rates.begin(), rates.end(), [](double r) {
    return std::abs(r - kNormalizationAnchorRate) < 1e-12;
  });
  if (anchor == rates.end())
    throw ConfigError("crate_curve: normalization requires a 0.5C entry");

  std::vector<CrateEntry> out(rates.size());
  parallel_for(rates.size(), threads, [&](std::size_t i) {
    SimulationResult res = run_cc_charge(design, rates[i], config);
    out[i].c_rate = rates[i];
    out[i].capacity_mAh_cm2 = res.capacity_mAh_cm2();
  });
  const double anchor_cap = out[static_cast<std::size_t>(anchor - rates.begin())].capacity_mAh_cm2;
  for (auto &e : out)
    e.normalized = anchor_cap > 0.0 ? e.capacity_mAh_cm2 / anchor_cap : 0.0;
  return out;
}

std::pair<double, double> time_and_soc_at_cutoff(const SimulationResult &result,
                                                 double specific_mAh_cm2) {
  const double minutes = result.duration_s() / 60.0;
  const double soc = capacity_retention(result.capacity_mAh_cm2(), specific_mAh_cm2);
  return {minutes, soc};
}

DesignMetrics evaluate_design(const CellDesign &design, double c_rate,
                              const SolverConfig &config) {
  DesignMetrics m;
  m.specific_capacity_mAh_cm2 = specific_capacity(design, config);
  SimulationResult res = run_cc_charge(design, c_rate, config);
  m.achieved_capacity_mAh_cm2 = res.capacity_mAh_cm2();
  m.retention = capacity_retention(m.achieved_capacity_mAh_cm2, m.specific_capacity_mAh_cm2);
  m.cathode_mass_g = design.cathode_mass_g();
  m.energy_density_Wh_g = energy_density_Wh_per_g(res, m.cathode_mass_g);
  const auto [minutes, soc] = time_and_soc_at_cutoff(res, m.specific_capacity_mAh_cm2);
  m.time_to_cutoff_min = minutes;
  m.soc_at_cutoff = soc;
  return m;
}

} // namespace mdfn
