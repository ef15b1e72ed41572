#include "mdfn/config.hpp"
#include "mdfn/csvio.hpp"
#include "mdfn/errors.hpp"
#include "mdfn/kinetics.hpp"
#include "mdfn/metrics.hpp"
#include "mdfn/pool.hpp"
#include "mdfn/protocol.hpp"
#include "mdfn/studio.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr const char *kVersion = "1.0.0";

using mdfn::RunConfig;
using nlohmann::json;

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Precedence: --out flag, config output.directory, MDFN_OUT_DIR, "./out".
std::filesystem::path resolve_out_dir(const std::string &cli_out, const RunConfig &cfg) {
  std::string dir = cli_out;
  if (dir.empty())
    dir = cfg.output.directory;
  if (dir.empty())
    if (const char *env = std::getenv(mdfn::kOutputDirEnvVar))
      dir = env;
  if (dir.empty())
    dir = "out";
  std::filesystem::create_directories(dir);
  return dir;
}

RunConfig load_run_config(const std::string &config_path, const std::string &preset) {
  if (!config_path.empty() && !preset.empty())
    throw mdfn::ConfigError("--config and --preset are mutually exclusive");
  if (!config_path.empty())
    return mdfn::load_config_file(config_path);
  return mdfn::default_config(preset.empty() ? "default-bilayer" : preset);
}

void write_series(const mdfn::SimulationResult &res, const std::string &hash,
                  const std::filesystem::path &path) {
  mdfn::CsvWriter w({"time_s", "voltage_V", "current_A", "capacity_mAh_cm2"});
  w.add_metadata("config_hash", hash);
  for (std::size_t i = 0; i < res.t.size(); ++i) {
    w.begin_row();
    w.add(res.t[i]);
    w.add(res.V[i]);
    w.add(res.I[i]);
    w.add(res.q[i]);
    w.end_row();
  }
  w.save(path.string());
}

void write_snapshots(const mdfn::SimulationResult &res, const mdfn::Mesh &mesh,
                     const std::string &hash, const std::filesystem::path &path) {
  mdfn::CsvWriter w({"snapshot", "time_s", "x_um", "c_e_mol_m3", "phi_e_V",
                     "c_s_surf_mol_m3", "j_rxn_A_m2"});
  w.add_metadata("config_hash", hash);
  for (std::size_t s = 0; s < res.snapshots.size(); ++s) {
    const auto &snap = res.snapshots[s];
    for (std::size_t n = 0; n < mesh.node_count(); ++n) {
      const int e = mesh.electrode_index[n];
      w.begin_row();
      w.add(static_cast<double>(s));
      w.add(snap.time);
      w.add(mesh.x_center[n] * 1e6);
      w.add(snap.c_e[n]);
      w.add(snap.phi_e[n]);
      w.add(e >= 0 ? snap.c_s_surf[static_cast<std::size_t>(e)] : std::nan(""));
      w.add(e >= 0 ? snap.j_rxn[static_cast<std::size_t>(e)] : std::nan(""));
      w.end_row();
    }
  }
  w.save(path.string());
}

/// Probe series at three fixed electrode locations: the first electrode node
/// past the separator, the electrode midpoint, and the last node before the
/// current collector. Reaction currents are reported normalized so that a
/// homogeneously utilized electrode reads 1 at every probe.
void write_probes(const mdfn::SimulationResult &res, const mdfn::CellDesign &design,
                  const mdfn::Mesh &mesh, double current_A, const std::string &hash,
                  const std::filesystem::path &path) {
  if (mesh.electrode_nodes.empty() || res.snapshots.empty())
    return;
  const std::size_t n_e = mesh.electrode_node_count();
  const std::size_t probes[3] = {0, n_e / 2, n_e - 1};
  const char *names[3] = {"sep", "mid", "cc"};

  double L = 0.0;
  for (const auto &l : design.layers)
    if (l.is_electrode())
      L += l.L;
  const double I_density = current_A / design.area;

  std::vector<std::string> header = {"time_s"};
  for (int p = 0; p < 3; ++p) {
    header.push_back(std::string("c_e_") + names[p] + "_mol_m3");
    header.push_back(std::string("phi_e_") + names[p] + "_V");
    header.push_back(std::string("j_norm_") + names[p]);
  }
  mdfn::CsvWriter w(header);
  w.add_metadata("config_hash", hash);
  for (const auto &snap : res.snapshots) {
    w.begin_row();
    w.add(snap.time);
    for (int p = 0; p < 3; ++p) {
      const std::size_t e = probes[p];
      const std::size_t n = mesh.electrode_nodes[e];
      const auto &layer = design.layers[mesh.regions[static_cast<std::size_t>(
                                                         mesh.region_of_node[n])]
                                            .layer_index];
      const double a_p = mdfn::specific_surface_area(layer.eps_e, layer.eps_cbd,
                                                     layer.chemistry->R_p);
      w.add(snap.c_e[n]);
      w.add(snap.phi_e[n]);
      w.add(I_density != 0.0
                ? mdfn::normalized_reaction_current(snap.j_rxn[e], L, a_p, I_density)
                : std::nan(""));
    }
    w.end_row();
  }
  w.save(path.string());
}

json result_summary(const mdfn::SimulationResult &res) {
  json j;
  j["termination"] = mdfn::to_string(res.termination);
  j["capacity_mAh_cm2"] = res.capacity_mAh_cm2();
  j["duration_s"] = res.duration_s();
  j["final_voltage_V"] = res.V.empty() ? 0.0 : res.V.back();
  j["min_c_e_mol_m3"] = res.min_c_e;
  j["min_c_e_node"] = res.min_c_e_node;
  j["min_c_e_electrode_mol_m3"] = res.min_c_e_electrode;
  j["min_c_e_electrode_node"] = res.min_c_e_electrode_node;
  j["peak_phi_e_V"] = res.peak_phi_e;
  j["peak_phi_e_node"] = res.peak_phi_e_node;
  if (res.depletion) {
    j["depletion"] = {{"time_s", res.depletion->time},
                      {"node", res.depletion->node},
                      {"c_e_mol_m3", res.depletion->c_e}};
  }
  return j;
}

void write_summary(const json &body, const RunConfig &cfg,
                   const std::filesystem::path &path) {
  json j = body;
  j["config_hash"] = mdfn::config_hash(cfg);
  j["version"] = kVersion;
  j["generated_utc"] = timestamp_utc();
  std::ofstream f(path);
  if (!f)
    throw mdfn::ConfigError("cannot write '" + path.string() + "'");
  f << j.dump(2) << "\n";
}

void write_sweep_rows(const std::vector<mdfn::SweepCase> &rows, const std::string &hash,
                      const std::filesystem::path &path) {
  mdfn::CsvWriter w({"id", "total_electrode_um", "i_1c_mA", "specific_capacity_mAh_cm2",
                     "capacity_mAh_cm2", "retention", "cathode_mass_g", "status",
                     "note"});
  w.add_metadata("config_hash", hash);
  for (const auto &r : rows) {
    double L = 0.0;
    for (const auto &l : r.design.layers)
      if (l.is_electrode())
        L += l.L;
    w.begin_row();
    w.add(r.id);
    w.add(L * 1e6);
    w.add(r.i_1c_mA);
    w.add(r.specific_capacity_mAh_cm2);
    w.add(r.capacity_mAh_cm2);
    w.add(r.retention);
    w.add(r.cathode_mass_g);
    w.add(std::string(r.failed ? "failed" : "ok"));
    w.add(r.note);
    w.end_row();
  }
  w.save(path.string());
}

int run_simulate(const RunConfig &cfg, double c_rate, const std::string &direction,
                 const std::filesystem::path &out, unsigned /*threads*/) {
  mdfn::SolverConfig solver_cfg = cfg.solver;
  solver_cfg.snapshot_count = cfg.output.snapshot_count;
  const mdfn::Mesh mesh = mdfn::build_mesh(cfg.design, solver_cfg);
  const mdfn::CellSolver solver(cfg.design, mesh, solver_cfg);

  const bool charging = direction != "discharge";
  const double i_1c = cfg.protocol.i_1c_A.value_or(cfg.design.i_1c_A());
  const double current_A = (charging ? 1.0 : -1.0) * c_rate * i_1c;
  const mdfn::CellState start = mdfn::initial_state(
      cfg.design, mesh, charging ? mdfn::Direction::Charge : mdfn::Direction::Discharge);
  mdfn::StopCondition stop;
  stop.cutoff_voltage = charging ? cfg.design.cutoff_upper : cfg.design.cutoff_lower;
  stop.time_limit_s = 3600.0 / c_rate; // nominal rated duration at this rate

  const auto res = mdfn::simulate_cc(solver, start, current_A, stop);

  const std::string hash = mdfn::config_hash(cfg);
  write_series(res, hash, out / "series.csv");
  write_snapshots(res, mesh, hash, out / "snapshots.csv");
  write_probes(res, cfg.design, mesh, current_A, hash, out / "probes.csv");

  json j;
  j["design"] = cfg.design.name;
  j["mode"] = charging ? "cc-charge" : "cc-discharge";
  j["c_rate"] = c_rate;
  j["current_A"] = current_A;
  j["rated_capacity_mAh_cm2"] = cfg.design.rated_capacity_mAh_cm2();
  j["result"] = result_summary(res);
  write_summary(j, cfg, out / "summary.json");

  std::cout << cfg.design.name << " " << (charging ? "charge" : "discharge") << " at "
            << c_rate << "C: " << mdfn::CsvWriter::format_number(res.capacity_mAh_cm2())
            << " mAh/cm^2 in " << mdfn::CsvWriter::format_number(res.duration_s() / 60.0)
            << " min (" << mdfn::to_string(res.termination) << ")\n";
  if (res.termination == mdfn::Termination::SolverFailure)
    throw mdfn::SolverError("time integration stalled before the stop condition");
  return 0;
}

int run_sweep(const RunConfig &cfg, double c_rate, const std::filesystem::path &out,
              unsigned threads) {
  const auto &study = cfg.study;
  std::vector<mdfn::SweepCase> rows;
  std::string best_metric = "capacity";

  if (study.type == "sensitivity") {
    mdfn::DesignSpace space;
    space.base = cfg.design;
    space.equalization_target_mAh_cm2 = study.equalization_target_mAh_cm2;
    rows = mdfn::sensitivity_sweep(space, study.cases, c_rate, cfg.solver, threads);
  } else if (study.type == "thickness-sweep") {
    if (study.total_thickness_um.empty())
      throw mdfn::ConfigError("thickness-sweep requires study.total_thickness_um");
    rows = mdfn::thickness_sweep(cfg.design, study.total_thickness_um, c_rate,
                                 cfg.solver, threads);
  } else if (study.type == "ratio-sweep") {
    if (study.nmc_fractions.empty())
      throw mdfn::ConfigError("ratio-sweep requires study.nmc_fractions");
    const double target = study.equalization_target_mAh_cm2.value_or(
        cfg.design.rated_capacity_mAh_cm2());
    rows = mdfn::ratio_sweep(cfg.design, study.nmc_fractions, target, c_rate,
                             cfg.solver, threads);
    best_metric = "retention";
  } else if (study.type == "mass-sweep") {
    if (study.total_thickness_um.empty())
      throw mdfn::ConfigError("mass-sweep requires study.total_thickness_um");
    rows = mdfn::thickness_sweep(cfg.design, study.total_thickness_um, c_rate,
                                 cfg.solver, threads);
  } else if (study.type == "crate-curve") {
    if (study.c_rates.empty())
      throw mdfn::ConfigError("crate-curve requires study.c_rates");
    const auto curve = mdfn::crate_curve(cfg.design, study.c_rates, cfg.solver, threads);
    mdfn::CsvWriter w({"c_rate", "capacity_mAh_cm2", "normalized_vs_0p5C"});
    w.add_metadata("config_hash", mdfn::config_hash(cfg));
    for (const auto &e : curve) {
      w.begin_row();
      w.add(e.c_rate);
      w.add(e.capacity_mAh_cm2);
      w.add(e.normalized);
      w.end_row();
    }
    w.save((out / "crate.csv").string());
    json j;
    j["design"] = cfg.design.name;
    j["study"] = study.type;
    j["rows"] = curve.size();
    write_summary(j, cfg, out / "summary.json");
    std::cout << "crate-curve: " << curve.size() << " rates -> " << (out / "crate.csv").string()
              << "\n";
    return 0;
  } else {
    throw mdfn::ConfigError("sweep requires study.type in sensitivity|thickness-sweep|"
                            "ratio-sweep|mass-sweep|crate-curve (got '" +
                            study.type + "')");
  }

  const std::string hash = mdfn::config_hash(cfg);
  write_sweep_rows(rows, hash, out / "sweep.csv");
  const std::size_t best = best_metric == "retention" ? mdfn::best_by_retention(rows)
                                                      : mdfn::best_by_capacity(rows);
  json j;
  j["design"] = cfg.design.name;
  j["study"] = study.type;
  j["c_rate"] = c_rate;
  j["rows"] = rows.size();
  if (best < rows.size()) {
    j["best"] = {{"id", rows[best].id},
                 {"metric", best_metric},
                 {"capacity_mAh_cm2", rows[best].capacity_mAh_cm2},
                 {"retention", rows[best].retention}};
  }
  write_summary(j, cfg, out / "summary.json");
  std::cout << study.type << ": " << rows.size() << " cases";
  if (best < rows.size())
    std::cout << ", best by " << best_metric << ": " << rows[best].id << " ("
              << mdfn::CsvWriter::format_number(rows[best].capacity_mAh_cm2)
              << " mAh/cm^2, retention "
              << mdfn::CsvWriter::format_number(rows[best].retention * 100.0) << "%)";
  std::cout << "\n";
  return 0;
}

int run_optimize(const RunConfig &cfg, double c_rate, const std::filesystem::path &out,
                 unsigned threads) {
  mdfn::DesignSpace space;
  space.base = cfg.design;
  space.equalization_target_mAh_cm2 = cfg.study.equalization_target_mAh_cm2;
  if (!cfg.study.total_thickness_um.empty())
    space.total_thickness_grid_um = cfg.study.total_thickness_um;
  if (!cfg.study.nmc_fractions.empty())
    space.nmc_fraction_grid = cfg.study.nmc_fractions;

  const auto res = mdfn::optimize(space, c_rate, cfg.solver, threads);

  const std::string hash = mdfn::config_hash(cfg);
  write_sweep_rows(res.trace, hash, out / "trace.csv");

  RunConfig best_cfg = cfg;
  best_cfg.design = res.best;
  best_cfg.study = {};
  std::ofstream bf(out / "best_design.json");
  bf << mdfn::serialize_config(best_cfg) << "\n";

  json j;
  j["study"] = "optimize";
  j["c_rate"] = c_rate;
  j["base_design"] = cfg.design.name;
  j["best_design"] = res.best.name;
  j["metrics"] = {{"specific_capacity_mAh_cm2", res.metrics.specific_capacity_mAh_cm2},
                  {"capacity_mAh_cm2", res.metrics.achieved_capacity_mAh_cm2},
                  {"retention", res.metrics.retention},
                  {"energy_density_Wh_g", res.metrics.energy_density_Wh_g},
                  {"cathode_mass_g", res.metrics.cathode_mass_g},
                  {"time_to_cutoff_min", res.metrics.time_to_cutoff_min},
                  {"soc_at_cutoff", res.metrics.soc_at_cutoff}};
  j["trace_rows"] = res.trace.size();
  j["warnings"] = res.warnings;
  write_summary(j, cfg, out / "summary.json");

  std::cout << "optimize at " << c_rate << "C: best '" << res.best.name << "' "
            << mdfn::CsvWriter::format_number(res.metrics.achieved_capacity_mAh_cm2)
            << " mAh/cm^2, retention "
            << mdfn::CsvWriter::format_number(res.metrics.retention * 100.0) << "% ("
            << res.trace.size() << " evaluations)\n";
  for (const auto &wmsg : res.warnings)
    std::cerr << "warning: " << wmsg << "\n";
  return 0;
}

int run_benchmark(const RunConfig &cfg, double c_rate, const std::filesystem::path &out,
                  unsigned threads) {
  std::vector<std::string> presets = cfg.study.benchmark_presets;
  if (presets.empty())
    presets = {"default-bilayer", "nmc-only-72um", "lfp-only-113um"};

  std::vector<mdfn::CellDesign> designs;
  for (const auto &p : presets) {
    mdfn::CellDesign d = mdfn::CellDesign::preset(p);
    if (cfg.study.equalization_target_mAh_cm2)
      d = mdfn::equalize_specific_capacity(d, *cfg.study.equalization_target_mAh_cm2, -1,
                                           cfg.solver);
    designs.push_back(std::move(d));
  }

  std::vector<mdfn::DesignMetrics> metrics(designs.size());
  mdfn::parallel_for(designs.size(), threads, [&](std::size_t i) {
    metrics[i] = mdfn::evaluate_design(designs[i], c_rate, cfg.solver);
  });

  mdfn::CsvWriter w({"preset", "total_electrode_um", "specific_capacity_mAh_cm2",
                     "capacity_mAh_cm2", "retention", "energy_density_Wh_g",
                     "cathode_mass_g", "time_to_cutoff_min", "soc_at_cutoff"});
  w.add_metadata("config_hash", mdfn::config_hash(cfg));
  for (std::size_t i = 0; i < designs.size(); ++i) {
    double L = 0.0;
    for (const auto &l : designs[i].layers)
      if (l.is_electrode())
        L += l.L;
    w.begin_row();
    w.add(presets[i]);
    w.add(L * 1e6);
    w.add(metrics[i].specific_capacity_mAh_cm2);
    w.add(metrics[i].achieved_capacity_mAh_cm2);
    w.add(metrics[i].retention);
    w.add(metrics[i].energy_density_Wh_g);
    w.add(metrics[i].cathode_mass_g);
    w.add(metrics[i].time_to_cutoff_min);
    w.add(metrics[i].soc_at_cutoff);
    w.end_row();
  }
  w.save((out / "benchmark.csv").string());

  json j;
  j["study"] = "benchmark";
  j["c_rate"] = c_rate;
  j["presets"] = presets;
  write_summary(j, cfg, out / "summary.json");

  for (std::size_t i = 0; i < designs.size(); ++i)
    std::cout << presets[i] << ": "
              << mdfn::CsvWriter::format_number(metrics[i].achieved_capacity_mAh_cm2)
              << " mAh/cm^2 at " << c_rate << "C, retention "
              << mdfn::CsvWriter::format_number(metrics[i].retention * 100.0) << "%\n";
  return 0;
}

int run_cycle(const RunConfig &cfg, const std::string &protocol_preset,
              const std::filesystem::path &out) {
  mdfn::Protocol protocol = cfg.protocol;
  if (protocol.steps.empty())
    protocol = mdfn::Protocol::preset(protocol_preset);

  const auto res = mdfn::run_protocol(cfg.design, protocol, cfg.solver);

  mdfn::CsvWriter w({"step", "mode", "c_rate", "capacity_mAh_cm2", "duration_min",
                     "final_voltage_V", "termination"});
  w.add_metadata("config_hash", mdfn::config_hash(cfg));
  for (std::size_t i = 0; i < res.steps.size(); ++i) {
    const auto &s = res.steps[i];
    w.begin_row();
    w.add(static_cast<double>(i));
    w.add(std::string(mdfn::to_string(s.mode)));
    w.add(s.c_rate);
    w.add(s.capacity_mAh_cm2());
    w.add(s.sim.duration_s() / 60.0);
    w.add(s.sim.V.empty() ? std::nan("") : s.sim.V.back());
    w.add(std::string(mdfn::to_string(s.sim.termination)));
    w.end_row();
  }
  w.save((out / "cycles.csv").string());

  json j;
  j["design"] = cfg.design.name;
  j["steps"] = res.steps.size();
  j["charge_capacities_mAh_cm2"] = res.charge_capacities();
  j["discharge_capacities_mAh_cm2"] = res.discharge_capacities();
  if (res.failed)
    j["failure"] = res.failure;
  write_summary(j, cfg, out / "summary.json");

  std::cout << cfg.design.name << ": " << res.steps.size() << " protocol steps";
  const auto charges = res.charge_capacities();
  if (!charges.empty()) {
    std::cout << ", charge capacities [mAh/cm^2]:";
    for (double c : charges)
      std::cout << " " << mdfn::CsvWriter::format_number(c);
  }
  std::cout << "\n";
  if (res.failed)
    throw mdfn::SolverError(res.failure);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Multilayer pseudo-2D lithium-ion half-cell simulator and electrode "
               "design toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, preset, direction = "charge", out_dir, protocol_preset = "3c-x4";
  double c_rate = 1.0;
  unsigned threads = 0;
  int snapshot_count = -1;

  auto add_common = [&](CLI::App *sub, bool with_rate) {
    sub->add_option("--config", config_path, "JSON run configuration file");
    sub->add_option("--preset", preset,
                    "built-in design preset (alternative to --config)")
        ->check(CLI::IsMember(mdfn::CellDesign::preset_names()));
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (0: hardware default)");
    if (with_rate)
      sub->add_option("--c-rate", c_rate, "current as a multiple of the rated 1C current")
          ->check(CLI::PositiveNumber);
  };

  auto *sim = app.add_subcommand("simulate", "run one constant-current segment");
  add_common(sim, true);
  sim->add_option("--direction", direction, "charge or discharge")
      ->check(CLI::IsMember({"charge", "discharge"}));
  sim->add_option("--snapshot-count", snapshot_count, "spatial snapshots to record");

  auto *swp = app.add_subcommand("sweep", "run the study described by the config");
  add_common(swp, true);

  auto *opt = app.add_subcommand("optimize", "staged electrode design search");
  add_common(opt, true);

  auto *bench = app.add_subcommand("benchmark", "compare design presets at one rate");
  add_common(bench, true);

  auto *cyc = app.add_subcommand("cycle", "run a multi-step cycling protocol");
  add_common(cyc, false);
  cyc->add_option("--protocol", protocol_preset, "cycling protocol preset")
      ->check(CLI::IsMember(mdfn::Protocol::preset_names()));

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_run_config(config_path, preset);
    if (snapshot_count >= 0)
      cfg.output.snapshot_count = snapshot_count;
    const std::filesystem::path out = resolve_out_dir(out_dir, cfg);

    if (sim->parsed())
      return run_simulate(cfg, c_rate, direction, out, threads);
    if (swp->parsed())
      return run_sweep(cfg, c_rate, out, threads);
    if (opt->parsed())
      return run_optimize(cfg, c_rate, out, threads);
    if (bench->parsed())
      return run_benchmark(cfg, c_rate, out, threads);
    if (cyc->parsed())
      return run_cycle(cfg, protocol_preset, out);
    return 0;
  } catch (const mdfn::ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mdfn::DomainError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mdfn::SolverError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mdfn::InfeasibleError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
