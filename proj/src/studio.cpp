#include "mdfn/studio.hpp"

#include "mdfn/errors.hpp"
#include "mdfn/pool.hpp"
#include "mdfn/state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <string_view>

namespace mdfn {

namespace {

constexpr double kEqualizeTol = 5e-3; //!< relative tolerance on the 0.05C match

void hash_double(std::uint64_t &h, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof bits);
  h ^= bits;
  h *= 0x100000001b3ull; // FNV-1a
}

std::uint64_t design_fingerprint(const CellDesign &d) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto &l : d.layers) {
    hash_double(h, l.L);
    hash_double(h, l.eps_e);
    hash_double(h, l.eps_cbd);
    hash_double(h, l.b);
    hash_double(h, l.sigma_s);
    hash_double(h, l.rated_mAh_cm2_per_um);
    hash_double(h, l.is_electrode() ? l.chemistry->c_s_max : 0.0);
  }
  hash_double(h, d.area);
  hash_double(h, d.R_contact);
  hash_double(h, d.j0_ce);
  hash_double(h, d.cutoff_upper);
  hash_double(h, d.cutoff_lower);
  return h;
}

double cached_specific(const CellDesign &design, const SolverConfig &config) {
  static std::map<std::uint64_t, double> cache;
  static std::mutex mu;
  const std::uint64_t key = design_fingerprint(design);
  {
    std::lock_guard lock(mu);
    const auto it = cache.find(key);
    if (it != cache.end())
      return it->second;
  }
  const double value = specific_capacity(design, config);
  std::lock_guard lock(mu);
  cache.emplace(key, value);
  return value;
}

CellDesign scaled(const CellDesign &design, int layer_index, double factor) {
  CellDesign d = design;
  for (std::size_t i = 1; i < d.layers.size(); ++i)
    if (layer_index < 0 || static_cast<int>(i) == layer_index)
      d.layers[i].L *= factor;
  return d;
}

SweepCase evaluate_case(std::string id, const CellDesign &design, double c_rate,
                        const SolverConfig &config) {
  SweepCase row;
  row.id = std::move(id);
  row.design = design;
  try {
    design.validate();
    row.i_1c_mA = design.i_1c_A() * 1e3;
    row.cathode_mass_g = design.cathode_mass_g();
    row.specific_capacity_mAh_cm2 = cached_specific(design, config);

    Mesh mesh = build_mesh(design, config);
    CellSolver solver(design, mesh, config);
    CellState s0 = initial_state(design, mesh, Direction::Charge);
    StopCondition stop;
    stop.cutoff_voltage = design.cutoff_upper;
    stop.time_limit_s = 3600.0 / c_rate;
    SimulationResult res = simulate_cc(solver, s0, c_rate * design.i_1c_A(), stop);
    if (res.termination == Termination::SolverFailure)
      throw SolverError("constant-current charge did not converge");
    row.capacity_mAh_cm2 = res.capacity_mAh_cm2();
    row.retention =
        capacity_retention(row.capacity_mAh_cm2, row.specific_capacity_mAh_cm2);
    if (res.depletion)
      row.note = "electrolyte depletion";
  } catch (const std::exception &e) {
    row.failed = true;
    row.note = e.what();
  }
  return row;
}

std::vector<SweepCase> evaluate_all(std::vector<std::pair<std::string, CellDesign>> cases,
                                    double c_rate, const SolverConfig &config,
                                    unsigned threads) {
  std::vector<SweepCase> rows(cases.size());
  parallel_for(cases.size(), threads, [&](std::size_t i) {
    rows[i] = evaluate_case(cases[i].first, cases[i].second, c_rate, config);
  });
  return rows;
}

/// Comparator used by both argmax helpers. Returns true when `a` beats `b`.
bool beats(const SweepCase &a, const SweepCase &b, bool by_capacity) {
  if (a.failed != b.failed)
    return !a.failed;
  const double pa = by_capacity ? a.capacity_mAh_cm2 : a.retention;
  const double pb = by_capacity ? b.capacity_mAh_cm2 : b.retention;
  const double sa = by_capacity ? a.retention : a.capacity_mAh_cm2;
  const double sb = by_capacity ? b.retention : b.capacity_mAh_cm2;
  constexpr double tol = 1e-6;
  if (std::abs(pa - pb) > tol * std::max(std::abs(pa), std::abs(pb)))
    return pa > pb;
  if (std::abs(sa - sb) > tol * std::max(std::abs(sa), std::abs(sb)))
    return sa > sb;
  return a.design.electrode_thickness() < b.design.electrode_thickness();
}

std::size_t argbest(const std::vector<SweepCase> &rows, bool by_capacity) {
  if (rows.empty())
    throw ConfigError("sweep: no cases to rank");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (beats(rows[i], rows[best], by_capacity))
      best = i;
  return best;
}

std::string format_um(double L_m) {
  std::ostringstream os;
  os << L_m * 1e6;
  return os.str();
}

} // namespace

double rerated_density(bool is_nmc, double eps_cbd) {
  // Anchor points: measured nameplate densities at the default and the
  // reduced-binder electrode builds. Linear in the binder fraction, clamped
  // to the anchored range.
  const double cbd_lo = is_nmc ? 0.04 : 0.07;
  const double cbd_hi = 0.11;
  const double d_lo = is_nmc ? rated_density::nmc_low_cbd : rated_density::lfp_low_cbd;
  const double d_hi = is_nmc ? rated_density::nmc_default : rated_density::lfp_default;
  const double t = std::clamp((eps_cbd - cbd_lo) / (cbd_hi - cbd_lo), 0.0, 1.0);
  return d_lo + t * (d_hi - d_lo);
}

CellDesign equalize_specific_capacity(const CellDesign &design, double target_mAh_cm2,
                                      int layer_index, const SolverConfig &config) {
  if (!(target_mAh_cm2 > 0.0))
    throw ConfigError("equalize: target capacity must be positive");
  design.validate();
  if (layer_index >= 0 && (static_cast<std::size_t>(layer_index) >= design.layers.size() ||
                           !design.layers[layer_index].is_electrode()))
    throw ConfigError("equalize: selected layer is not an electrode layer");

  // a probe whose reference charge cannot be integrated marks the target as
  // unreachable within this design family, not a solver defect of the caller
  auto safe_specific = [&](const CellDesign &d) {
    try {
      return cached_specific(d, config);
    } catch (const SolverError &e) {
      throw InfeasibleError(std::string("equalize: probe evaluation failed: ") + e.what());
    }
  };
  auto relative_miss = [&](const CellDesign &d) {
    return safe_specific(d) / target_mAh_cm2 - 1.0;
  };

  // Nameplate seed: the reference capacity is linear in thickness wherever
  // the rated-duration cap binds, so this usually lands inside tolerance.
  const double seed = target_mAh_cm2 / cached_specific(design, config);
  CellDesign trial = scaled(design, layer_index, seed);
  double miss = relative_miss(trial);
  if (std::abs(miss) <= kEqualizeTol)
    return trial;

  // Bracket around the seed and bisect on the scale factor.
  double lo = seed, hi = seed;
  double f_lo = miss, f_hi = miss;
  for (int i = 0; i < 60 && f_lo > 0.0; ++i) {
    lo *= 0.8;
    f_lo = relative_miss(scaled(design, layer_index, lo));
  }
  for (int i = 0; i < 60 && f_hi < 0.0; ++i) {
    hi *= 1.25;
    f_hi = relative_miss(scaled(design, layer_index, hi));
  }
  if (f_lo > 0.0 || f_hi < 0.0)
    throw InfeasibleError("equalize: could not bracket the target capacity");
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    trial = scaled(design, layer_index, mid);
    miss = relative_miss(trial);
    if (std::abs(miss) <= kEqualizeTol)
      return trial;
    (miss < 0.0 ? lo : hi) = mid;
  }
  throw InfeasibleError("equalize: bisection did not converge to the target capacity");
}

std::vector<SweepCase> sensitivity_sweep(const DesignSpace &space,
                                         const std::vector<CaseOverride> &cases,
                                         double c_rate, const SolverConfig &config,
                                         unsigned threads) {
  std::vector<std::pair<std::string, CellDesign>> jobs;
  std::vector<SweepCase> rows(cases.size());
  std::vector<std::size_t> job_case; // input index of each queued job
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto &c = cases[ci];
    CellDesign d = space.base;
    try {
      if (c.layers.size() > d.layers.size())
        throw ConfigError("sensitivity case '" + c.id + "': more overrides than layers");
      for (std::size_t i = 0; i < c.layers.size(); ++i) {
        const auto &ov = c.layers[i];
        auto &layer = d.layers[i];
        if (ov.L_um)
          layer.L = *ov.L_um * 1e-6;
        if (ov.eps_e)
          layer.eps_e = *ov.eps_e;
        if (ov.b)
          layer.b = *ov.b;
        if (ov.eps_cbd && layer.is_electrode()) {
          layer.eps_cbd = *ov.eps_cbd;
          layer.rated_mAh_cm2_per_um =
              rerated_density(layer.chemistry->name == "NMC622", layer.eps_cbd);
        }
        if (layer.is_electrode() && ov.eps_e &&
            !(layer.eps_e >= space.eps_e_lo && layer.eps_e <= space.eps_e_hi))
          throw ConfigError("sensitivity case '" + c.id + "': porosity outside bounds");
      }
      if (space.equalization_target_mAh_cm2)
        d = equalize_specific_capacity(d, *space.equalization_target_mAh_cm2, -1, config);
      jobs.emplace_back(c.id, std::move(d));
      job_case.push_back(ci);
    } catch (const std::exception &e) {
      rows[ci].id = c.id;
      rows[ci].design = space.base;
      rows[ci].failed = true;
      rows[ci].note = e.what();
    }
  }
  std::vector<SweepCase> evaluated = evaluate_all(std::move(jobs), c_rate, config, threads);
  for (std::size_t j = 0; j < evaluated.size(); ++j)
    rows[job_case[j]] = std::move(evaluated[j]);
  return rows;
}

std::vector<SweepCase> thickness_sweep(const CellDesign &design,
                                       const std::vector<double> &totals_um,
                                       double c_rate, const SolverConfig &config,
                                       unsigned threads) {
  if (design.electrode_layer_count() != 2)
    throw ConfigError("thickness sweep: needs a bilayer design");
  std::vector<std::pair<std::string, CellDesign>> jobs;
  for (double total : totals_um) {
    if (!(total > 0.0))
      throw ConfigError("thickness sweep: totals must be positive");
    CellDesign d = design;
    d.layers[1].L = 0.5 * total * 1e-6;
    d.layers[2].L = 0.5 * total * 1e-6;
    jobs.emplace_back("total-" + format_um(total * 1e-6) + "um", std::move(d));
  }
  return evaluate_all(std::move(jobs), c_rate, config, threads);
}

std::vector<SweepCase> ratio_sweep(const CellDesign &design,
                                   const std::vector<double> &nmc_fractions,
                                   double target_mAh_cm2, double c_rate,
                                   const SolverConfig &config, unsigned threads) {
  if (design.electrode_layer_count() != 2)
    throw ConfigError("ratio sweep: needs a bilayer design");
  if (!(target_mAh_cm2 > 0.0))
    throw ConfigError("ratio sweep: needs a positive equalization target");
  const double d1 = design.layers[1].rated_mAh_cm2_per_um;
  const double d2 = design.layers[2].rated_mAh_cm2_per_um;
  std::vector<std::pair<std::string, CellDesign>> jobs;
  std::vector<SweepCase> rows;
  for (double f : nmc_fractions) {
    std::ostringstream id;
    id << "nmc-" << f * 100.0 << "pct";
    if (!(f > 0.0 && f < 1.0)) {
      SweepCase row;
      row.id = id.str();
      row.design = design;
      row.failed = true;
      row.note = "infeasible NMC fraction (must lie strictly inside (0, 1))";
      rows.push_back(std::move(row));
      continue;
    }
    // nameplate capacity is linear in both thicknesses, so the matched pair
    // at this fraction is closed-form
    const double density = f * d1 + (1.0 - f) * d2;
    const double total_um = target_mAh_cm2 / density;
    CellDesign d = design;
    d.layers[1].L = f * total_um * 1e-6;
    d.layers[2].L = (1.0 - f) * total_um * 1e-6;
    jobs.emplace_back(id.str(), std::move(d));
  }
  std::vector<SweepCase> evaluated = evaluate_all(std::move(jobs), c_rate, config, threads);
  rows.insert(rows.end(), std::make_move_iterator(evaluated.begin()),
              std::make_move_iterator(evaluated.end()));
  return rows;
}

std::vector<SweepCase> mass_sweep(const std::vector<CellDesign> &designs, double c_rate,
                                  const SolverConfig &config, unsigned threads) {
  std::vector<std::pair<std::string, CellDesign>> jobs;
  for (std::size_t i = 0; i < designs.size(); ++i) {
    std::ostringstream id;
    id << "mass-" << designs[i].cathode_mass_g() * 1e3 << "mg-" << i;
    jobs.emplace_back(id.str(), designs[i]);
  }
  return evaluate_all(std::move(jobs), c_rate, config, threads);
}

std::size_t best_by_capacity(const std::vector<SweepCase> &rows) {
  return argbest(rows, true);
}

std::size_t best_by_retention(const std::vector<SweepCase> &rows) {
  return argbest(rows, false);
}

OptimizeResult optimize(const DesignSpace &space, double c_rate,
                        const SolverConfig &config, unsigned threads) {
  space.base.validate();
  OptimizeResult out;
  CellDesign incumbent = space.base;
  const double target = space.equalization_target_mAh_cm2.value_or(
      incumbent.rated_capacity_mAh_cm2());

  auto evaluate = [&](const std::string &id, const CellDesign &d) {
    SweepCase row = evaluate_case(id, d, c_rate, config);
    out.trace.push_back(row);
    return row;
  };

  SweepCase best_row = evaluate("stage0-base", incumbent);
  if (best_row.failed)
    throw SolverError("optimize: base design evaluation failed: " + best_row.note);

  // Stage 1: coordinate search over microstructure grids at equalized
  // reference capacity; accept capacity-improving moves.
  if (space.optimize_microstructure) {
    for (std::size_t li = 1; li < incumbent.layers.size(); ++li) {
      struct Coord {
        const char *tag;
        const std::vector<double> *grid;
      };
      const Coord coords[] = {{"eps_cbd", &space.eps_cbd_grid},
                              {"eps_e", &space.eps_e_grid},
                              {"b", &space.b_grid}};
      for (const auto &coord : coords) {
        std::vector<std::pair<std::string, CellDesign>> jobs;
        for (double v : *coord.grid) {
          CellDesign d = incumbent;
          auto &layer = d.layers[li];
          if (std::string_view(coord.tag) == "eps_e") {
            if (v < space.eps_e_lo || v > space.eps_e_hi)
              continue;
            const double base_eps = space.base.layers[li].eps_e;
            if (std::abs(v - base_eps) > space.porosity_window * base_eps)
              continue;
            layer.eps_e = v;
          } else if (std::string_view(coord.tag) == "eps_cbd") {
            layer.eps_cbd = v;
            layer.rated_mAh_cm2_per_um =
                rerated_density(layer.chemistry->name == "NMC622", v);
          } else {
            layer.b = v;
          }
          if (layer.eps_e + layer.eps_cbd >= 0.95)
            continue;
          try {
            d = equalize_specific_capacity(d, target, -1, config);
          } catch (const std::exception &) {
            continue;
          }
          std::ostringstream id;
          id << "stage1-layer" << li << "-" << coord.tag << "-" << v;
          jobs.emplace_back(id.str(), std::move(d));
        }
        std::vector<SweepCase> rows = evaluate_all(std::move(jobs), c_rate, config, threads);
        for (auto &r : rows)
          out.trace.push_back(r);
        if (rows.empty())
          continue;
        const std::size_t bi = best_by_capacity(rows);
        if (!rows[bi].failed && beats(rows[bi], best_row, /*by_capacity=*/true)) {
          best_row = rows[bi];
          incumbent = rows[bi].design;
        }
      }
    }
  }

  // Stage 2: total-thickness grid at equal sub-layer split.
  if (space.optimize_thickness && incumbent.electrode_layer_count() == 2 &&
      !space.total_thickness_grid_um.empty()) {
    std::vector<SweepCase> rows =
        thickness_sweep(incumbent, space.total_thickness_grid_um, c_rate, config, threads);
    for (auto &r : rows) {
      r.id = "stage2-" + r.id;
      out.trace.push_back(r);
    }
    const std::size_t bi = best_by_capacity(rows);
    if (!rows[bi].failed && beats(rows[bi], best_row, /*by_capacity=*/true)) {
      best_row = rows[bi];
      incumbent = rows[bi].design;
    }
  }

  // Stage 3: sub-layer ratio grid holding the incumbent's nameplate capacity.
  if (space.optimize_ratio && incumbent.electrode_layer_count() == 2 &&
      !space.nmc_fraction_grid.empty()) {
    const double stage3_target = incumbent.rated_capacity_mAh_cm2();
    std::vector<SweepCase> rows = ratio_sweep(incumbent, space.nmc_fraction_grid,
                                              stage3_target, c_rate, config, threads);
    for (auto &r : rows) {
      r.id = "stage3-" + r.id;
      out.trace.push_back(r);
    }
    const std::size_t bi = best_by_retention(rows);
    if (!rows[bi].failed && beats(rows[bi], best_row, /*by_capacity=*/false)) {
      best_row = rows[bi];
      incumbent = rows[bi].design;
    }
  }

  for (const auto &r : out.trace)
    if (r.failed)
      out.warnings.push_back("case " + r.id + " failed: " + r.note);

  incumbent.name = "optimized-" + space.base.name;
  out.best = incumbent;
  out.metrics = evaluate_design(incumbent, c_rate, config);
  return out;
}

} // namespace mdfn
