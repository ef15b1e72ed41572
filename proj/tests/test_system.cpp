#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdfn/config.hpp"
#include "mdfn/csvio.hpp"
#include "mdfn/errors.hpp"
#include "mdfn/metrics.hpp"
#include "mdfn/pool.hpp"
#include "mdfn/protocol.hpp"
#include "mdfn/studio.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

using namespace mdfn;

namespace {

std::filesystem::path temp_dir(const char *tag) {
  auto p = std::filesystem::temp_directory_path() / (std::string("mdfn-test-") + tag);
  std::filesystem::create_directories(p);
  return p;
}

int run_cli(const std::string &args) {
  const std::string cmd = std::string(MDFN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST_CASE("parallel_for covers every index once and propagates exceptions") {
  std::vector<std::atomic<int>> hits(97);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto &h : hits)
    CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(8, 3,
                               [](std::size_t i) {
                                 if (i == 5)
                                   throw ConfigError("boom");
                               }),
                  ConfigError);
}

TEST_CASE("specific capacity of the presets reproduces the nameplate rating") {
  SolverConfig cfg;
  for (const char *name : {"default-bilayer", "nmc-only-72um", "lfp-only-113um"}) {
    const CellDesign d = CellDesign::preset(name);
    const double q = specific_capacity(d, cfg);
    CHECK(q == doctest::Approx(d.rated_capacity_mAh_cm2()).epsilon(2e-3));
  }
}

TEST_CASE("capacity retention guards its reference") {
  CHECK(capacity_retention(2.0, 4.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS((void)capacity_retention(1.0, 0.0), ConfigError);
}

TEST_CASE("normalized reaction current is unity for homogeneous utilization") {
  // a uniform electrode carrying I over thickness L reacts at J = I / (L a)
  const double L = 88e-6, a = 3.5e5, I = 100.0;
  const double J = I / (L * a);
  CHECK(normalized_reaction_current(J, L, a, I) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)normalized_reaction_current(J, L, a, 0.0), ConfigError);
}

TEST_CASE("crate curve requires the 0.5C anchor and normalizes against it") {
  SolverConfig cfg;
  const CellDesign d = CellDesign::preset("default-bilayer");
  CHECK_THROWS_AS((void)crate_curve(d, {1.0, 3.0}, cfg, 2), ConfigError);
  const auto curve = crate_curve(d, {0.5, 3.0}, cfg, 2);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].normalized == doctest::Approx(1.0));
  CHECK(curve[1].normalized ==
        doctest::Approx(curve[1].capacity_mAh_cm2 / curve[0].capacity_mAh_cm2));
  CHECK(curve[1].capacity_mAh_cm2 < curve[0].capacity_mAh_cm2);
}

TEST_CASE("protocol runs chain steps through the terminal state") {
  SolverConfig cfg;
  const CellDesign d = CellDesign::preset("default-bilayer");
  Protocol p;
  p.steps = {Protocol::cc_charge(3.0).steps[0], Protocol::cc_discharge(3.0).steps[0]};
  const ProtocolResult res = run_protocol(d, p, cfg);
  REQUIRE_FALSE(res.failed);
  REQUIRE(res.steps.size() == 2);
  CHECK(res.steps[0].sim.termination == Termination::Cutoff);
  CHECK(res.steps[1].sim.termination == Termination::Cutoff);
  // the discharge starts where the charge ended
  CHECK(res.steps[1].sim.t.front() == doctest::Approx(res.steps[0].sim.t.back()));
  CHECK(res.charge_capacities().size() == 1);
  CHECK(res.discharge_capacities().size() == 1);
}

TEST_CASE("equalization scales thickness to hit a reference capacity") {
  SolverConfig cfg;
  const CellDesign base = CellDesign::preset("nmc-only-72um");
  const double target = 3.20;
  const CellDesign eq = equalize_specific_capacity(base, target, -1, cfg);
  CHECK(specific_capacity(eq, cfg) == doctest::Approx(target).epsilon(5e-3));
  CHECK(eq.layers[1].L < base.layers[1].L); // smaller target, thinner electrode
  CHECK_THROWS_AS(
      (void)equalize_specific_capacity(base, 100.0, -1, cfg), InfeasibleError);
}

TEST_CASE("thickness sweep keeps a 50:50 split and flags the capacity cliff") {
  SolverConfig cfg;
  const CellDesign d = CellDesign::preset("optimal-bilayer");
  const auto rows = thickness_sweep(d, {88.0, 140.0}, 3.0, cfg, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].design.layers[1].L == doctest::Approx(44e-6));
  CHECK(rows[0].design.layers[2].L == doctest::Approx(44e-6));
  CHECK_FALSE(rows[0].failed);
  CHECK_FALSE(rows[1].failed);
  // past the transport limit the thicker electrode collapses
  CHECK(rows[1].capacity_mAh_cm2 < 0.5 * rows[0].capacity_mAh_cm2);
}

TEST_CASE("ratio sweep holds the nameplate capacity across fractions") {
  SolverConfig cfg;
  const CellDesign d = CellDesign::preset("optimal-bilayer");
  const double target = d.rated_capacity_mAh_cm2();
  const auto rows = ratio_sweep(d, {0.398, 0.903}, target, 3.0, cfg, 2);
  REQUIRE(rows.size() == 2);
  for (const auto &r : rows) {
    REQUIRE_FALSE(r.failed);
    CHECK(r.design.rated_capacity_mAh_cm2() == doctest::Approx(target).epsilon(1e-9));
  }
  // the 39.8% NMC pair reproduces the expected sub-layer thicknesses
  CHECK(rows[0].design.layers[1].L * 1e6 == doctest::Approx(47.0).epsilon(2e-3));
  CHECK(rows[0].design.layers[2].L * 1e6 == doctest::Approx(71.1).epsilon(2e-3));
}

TEST_CASE("sensitivity sweep records infeasible cases without aborting") {
  SolverConfig cfg;
  DesignSpace space;
  space.base = CellDesign::preset("default-bilayer");
  std::vector<CaseOverride> cases(2);
  cases[0].id = "base";
  cases[1].id = "too-porous";
  cases[1].layers.resize(3);
  cases[1].layers[1].eps_e = 0.60; // outside the admissible porosity bounds
  const auto rows = sensitivity_sweep(space, cases, 3.0, cfg, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].id == "base");
  CHECK_FALSE(rows[0].failed);
  CHECK(rows[1].failed);
  CHECK(rows[1].note.find("porosity") != std::string::npos);
}

TEST_CASE("best-row selection ignores failed rows") {
  std::vector<SweepCase> rows(3);
  rows[0].capacity_mAh_cm2 = 9.0;
  rows[0].failed = true;
  rows[1].capacity_mAh_cm2 = 2.0;
  rows[1].retention = 0.5;
  rows[2].capacity_mAh_cm2 = 3.0;
  rows[2].retention = 0.4;
  CHECK(best_by_capacity(rows) == 2);
  CHECK(best_by_retention(rows) == 1);
}

TEST_CASE("cli: simulate writes series, snapshots, probes and summary") {
  const auto out = temp_dir("sim");
  REQUIRE(run_cli("simulate --preset default-bilayer --c-rate 3 --out " + out.string()) == 0);
  const CsvTable series = load_csv((out / "series.csv").string());
  CHECK(series.metadata.at(0).rfind("config_hash=", 0) == 0);
  CHECK(series.column("time_s") == 0);
  CHECK(series.rows.size() > 10);
  const CsvTable snaps = load_csv((out / "snapshots.csv").string());
  CHECK(snaps.header.size() == 7);
  const CsvTable probes = load_csv((out / "probes.csv").string());
  CHECK(probes.column("j_norm_sep") < probes.header.size());
  CHECK(std::filesystem::exists(out / "summary.json"));
}

TEST_CASE("cli: exit codes distinguish config, solver and infeasibility errors") {
  const auto out = temp_dir("codes");
  // usage error: CLI11 rejects the unknown subcommand (conventional exit 1xx range
  // is CLI11's; anything nonzero and distinct from our domain codes is accepted)
  const int usage = run_cli("frobnicate");
  CHECK(usage != 0);

  // config error -> 2
  const auto bad = out / "bad.json";
  std::ofstream(bad) << R"({"design": {"preset": "default-bilayer"}, "bogus": 1})";
  CHECK(run_cli("simulate --config " + bad.string()) == 2);

  // infeasible equalization target -> 4
  const auto infeasible = out / "infeasible.json";
  std::ofstream(infeasible) << R"({
    "design": {"preset": "default-bilayer"},
    "study": {"type": "benchmark", "benchmark_presets": ["nmc-only-72um"],
              "equalization_target_mAh_cm2": 100.0}
  })";
  CHECK(run_cli("benchmark --config " + infeasible.string() + " --out " + out.string()) == 4);
}

TEST_CASE("cli: sweep study type is required and validated") {
  const auto out = temp_dir("sweep");
  const auto cfgpath = out / "none.json";
  std::ofstream(cfgpath) << R"({"design": {"preset": "default-bilayer"}})";
  CHECK(run_cli("sweep --config " + cfgpath.string() + " --out " + out.string()) == 2);
}

TEST_CASE("cli: cycle emits one row per protocol step") {
  const auto out = temp_dir("cycle");
  REQUIRE(run_cli("cycle --preset default-bilayer --protocol 3c-01c-3c --out " +
                  out.string()) == 0);
  const CsvTable t = load_csv((out / "cycles.csv").string());
  REQUIRE(t.rows.size() == 3);
  const auto cap = t.column("capacity_mAh_cm2");
  const double q0 = t.number(0, cap), q2 = t.number(2, cap);
  CHECK(std::abs(q0 - q2) / q0 < 0.01);
}
