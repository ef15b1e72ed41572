#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdfn/chemistry.hpp"
#include "mdfn/config.hpp"
#include "mdfn/csvio.hpp"
#include "mdfn/design.hpp"
#include "mdfn/electrolyte.hpp"
#include "mdfn/errors.hpp"
#include "mdfn/kinetics.hpp"
#include "mdfn/mesh.hpp"
#include "mdfn/ocp.hpp"
#include "mdfn/protocol.hpp"
#include "mdfn/state.hpp"

#include <cmath>

using namespace mdfn;

TEST_CASE("nmc622 open-circuit potential matches frozen reference values") {
  const OcpCurve u = OcpCurve::nmc622();
  CHECK(u.value(0.27446) == doctest::Approx(4.1918943814).epsilon(1e-9));
  CHECK(u.value(0.30) == doctest::Approx(4.1219712751).epsilon(1e-9));
  CHECK(u.value(0.40) == doctest::Approx(3.9321367352).epsilon(1e-9));
  CHECK(u.value(0.50) == doctest::Approx(3.8217023752).epsilon(1e-9));
  CHECK(u.value(0.60) == doctest::Approx(3.7490420831).epsilon(1e-9));
  CHECK(u.value(0.70) == doctest::Approx(3.6918458061).epsilon(1e-9));
  CHECK(u.value(0.80) == doctest::Approx(3.6359721709).epsilon(1e-9));
  CHECK(u.value(0.90) == doctest::Approx(3.5311142291).epsilon(1e-9));
  CHECK(u.value(0.92) == doctest::Approx(3.1731945719).epsilon(1e-9));
  // outside the fitted window the curve continues linearly
  CHECK(u.value_extended(0.92131) == doctest::Approx(3.0307286924).epsilon(1e-9));
  CHECK_THROWS_AS((void)u.value(0.95), DomainError);
  CHECK_THROWS_AS((void)u.value(0.20), DomainError);
}

TEST_CASE("lfp open-circuit potential: plateau with end walls") {
  CHECK(ocp_lfp(0.3) == doctest::Approx(3.414904761905).epsilon(1e-12));
  CHECK(ocp_lfp(0.7) == doctest::Approx(3.411095238095).epsilon(1e-12));
  CHECK(ocp_lfp(0.5) == doctest::Approx(3.413).epsilon(1e-12));
  CHECK_THROWS_AS((void)ocp_lfp(0.0), DomainError);
  CHECK_THROWS_AS((void)ocp_lfp(1.0), DomainError);
  // solver curve: linear extension outside the inner window keeps values finite
  const OcpCurve u = OcpCurve::lfp();
  CHECK(std::isfinite(u.value_extended(0.0)));
  CHECK(std::isfinite(u.value_extended(1.0)));
  CHECK(u.value_extended(0.0) > 4.2);  // empty particle cannot delithiate further
  CHECK(u.value_extended(1.0) < 3.0);  // full particle cannot lithiate further
}

TEST_CASE("specific surface area and bruggeman correction") {
  CHECK(specific_surface_area(0.31, 0.11, 4.94e-6) ==
        doctest::Approx(352226.72064777324).epsilon(1e-12));
  CHECK(effective_transport(1.0, 0.3, 1.5) ==
        doctest::Approx(0.1643167672515498).epsilon(1e-12));
  CHECK(effective_transport(2.0, 1.0, 1.5) == doctest::Approx(2.0));
}

TEST_CASE("electrolyte transport correlations match frozen reference values") {
  const ElectrolyteSpec e = ElectrolyteSpec::lipf6_valoen_reimers();
  const double T = 293.15;
  CHECK(e.D_e_bulk(200.0, T) == doctest::Approx(4.499500917179e-10).epsilon(1e-9));
  CHECK(e.D_e_bulk(500.0, T) == doctest::Approx(3.684332561145e-10).epsilon(1e-9));
  CHECK(e.D_e_bulk(1000.0, T) == doctest::Approx(2.626261773855e-10).epsilon(1e-9));
  CHECK(e.D_e_bulk(1500.0, T) == doctest::Approx(1.858017059996e-10).epsilon(1e-9));
  CHECK(e.D_e_bulk(1000.0, 313.15) == doctest::Approx(4.467065685283e-10).epsilon(1e-9));
  CHECK(e.kappa_e_bulk(200.0, T) == doctest::Approx(0.8038798633103).epsilon(1e-9));
  CHECK(e.kappa_e_bulk(500.0, T) == doctest::Approx(1.542426633912).epsilon(1e-9));
  CHECK(e.kappa_e_bulk(1000.0, T) == doctest::Approx(1.908434152678).epsilon(1e-9));
  CHECK(e.kappa_e_bulk(1500.0, T) == doctest::Approx(1.671271148748).epsilon(1e-9));
  CHECK(e.activity_factor(200.0, T) == doctest::Approx(1.062179625699).epsilon(1e-9));
  CHECK(e.activity_factor(500.0, T) == doctest::Approx(1.582047859365).epsilon(1e-9));
  CHECK(e.activity_factor(1000.0, T) == doctest::Approx(2.837804956044).epsilon(1e-9));
  CHECK(e.activity_factor(1500.0, T) == doctest::Approx(4.521237425697).epsilon(1e-9));
  CHECK(e.t_plus == doctest::Approx(0.37));
  CHECK(e.c_e0 == doctest::Approx(1000.0));
}

TEST_CASE("exchange current density vanishes at the stoichiometric limits") {
  KineticsContext ctx;
  const double k = 1e-10, cmax = 48700.0;
  CHECK(exchange_current_density(k, 1000.0, 0.0, cmax, ctx) == 0.0);
  CHECK(exchange_current_density(k, 1000.0, cmax, cmax, ctx) == 0.0);
  CHECK(exchange_current_density(k, 0.0, 0.5 * cmax, cmax, ctx) == 0.0);
  const double j0 = exchange_current_density(k, 1000.0, 0.5 * cmax, cmax, ctx);
  CHECK(j0 == doctest::Approx(ctx.F * k * std::sqrt(1000.0) * 0.5 * cmax).epsilon(1e-12));
}

TEST_CASE("design presets: rated capacities and 1C currents") {
  const CellDesign def = CellDesign::preset("default-bilayer");
  CHECK(def.rated_capacity_mAh_cm2() == doctest::Approx(3.741716).epsilon(1e-9));
  CHECK(def.i_1c_A() == doctest::Approx(3.741716e-3 * 1.54).epsilon(1e-9));
  CHECK(def.layers.size() == 3);
  CHECK_FALSE(def.layers[0].is_electrode());
  CHECK(def.layers[1].chemistry->name == "NMC622");
  CHECK(def.layers[2].chemistry->name == "LFP");

  const CellDesign opt = CellDesign::preset("optimal-bilayer");
  CHECK(opt.rated_capacity_mAh_cm2() == doctest::Approx(0.052701 * 47 + 0.031450 * 71).epsilon(1e-9));

  const CellDesign nmc = CellDesign::preset("nmc-only-72um");
  CHECK(nmc.rated_capacity_mAh_cm2() == doctest::Approx(0.051938 * 72).epsilon(1e-9));
  const CellDesign lfp = CellDesign::preset("lfp-only-113um");
  CHECK(lfp.rated_capacity_mAh_cm2() == doctest::Approx(0.033101 * 113).epsilon(1e-9));

  CHECK_THROWS_AS(CellDesign::preset("no-such-preset"), ConfigError);
}

TEST_CASE("design validation rejects non-physical volume fractions") {
  CellDesign d = CellDesign::preset("default-bilayer");
  d.layers[1].eps_e = 0.95; // eps_e + eps_cbd > 1
  d.layers[1].eps_cbd = 0.11;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = CellDesign::preset("default-bilayer");
  d.cutoff_upper = d.cutoff_lower - 0.1;
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("mesh: region boundaries on faces, uniform spacing per region") {
  const CellDesign d = CellDesign::preset("default-bilayer");
  SolverConfig cfg;
  const Mesh mesh = build_mesh(d, cfg);
  CHECK(mesh.node_count() == 90);
  CHECK(mesh.regions.size() == 3);
  CHECK(mesh.electrode_node_count() == 60);
  // separator nodes carry no electrode index
  for (std::size_t i = 0; i < 30; ++i)
    CHECK(mesh.electrode_index[i] == -1);
  CHECK(mesh.electrode_index[30] == 0);
  // total thickness recovered by summing cell widths
  double L = 0.0;
  for (double dx : mesh.dx)
    L += dx;
  CHECK(L == doctest::Approx(d.total_thickness()).epsilon(1e-12));
  // first electrode cell center sits half a cell past the separator
  CHECK(mesh.x_center[30] ==
        doctest::Approx(16e-6 + 0.5 * mesh.dx[30]).epsilon(1e-12));
}

TEST_CASE("initial states load the configured uniform concentrations") {
  const CellDesign d = CellDesign::preset("default-bilayer");
  SolverConfig cfg;
  const Mesh mesh = build_mesh(d, cfg);
  const CellState charge = initial_state(d, mesh, Direction::Charge);
  const CellState discharge = initial_state(d, mesh, Direction::Discharge);
  CHECK(charge.c_e[0] == doctest::Approx(1000.0));
  CHECK(charge.c_s_at(mesh, 0, 0) == doctest::Approx(44868.0));
  CHECK(charge.c_s_at(mesh, 59, cfg.radial_shells - 1) == doctest::Approx(22751.0));
  CHECK(discharge.c_s_at(mesh, 0, 0) == doctest::Approx(13366.0));
  CHECK(discharge.c_s_at(mesh, 59, 0) == doctest::Approx(29.0));
}

TEST_CASE("protocol validation and presets") {
  CHECK(Protocol::preset("3c-x4").steps.size() == 8);
  CHECK(Protocol::preset("3c-01c-3c").steps.size() == 3);
  CHECK_THROWS_AS(Protocol::preset("nope"), ConfigError);

  Protocol p;
  CHECK_THROWS_AS(p.validate(), ConfigError); // empty
  ProtocolStep s;
  s.mode = StepMode::CcCharge;
  s.c_rate = 0.0;
  s.time_limit_s = 10.0;
  p.steps = {s};
  CHECK_THROWS_AS(p.validate(), ConfigError); // zero rate
  p.steps[0].c_rate = 1.0;
  p.steps[0].time_limit_s.reset();
  CHECK_THROWS_AS(p.validate(), ConfigError); // no stop condition
  p.steps[0].cutoff_voltage = 4.2;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("csv writer/loader round trip with metadata and nan cells") {
  CsvWriter w({"a", "b_V"});
  w.add_metadata("config_hash", "deadbeef");
  w.begin_row();
  w.add(1.5);
  w.add(std::nan(""));
  w.end_row();
  const CsvTable t = parse_csv(w.str());
  CHECK(t.metadata.size() == 1);
  CHECK(t.metadata[0] == "config_hash=deadbeef");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.number(0, t.column("a")) == doctest::Approx(1.5));
  CHECK(std::isnan(t.number(0, t.column("b_V"))));
  CHECK_THROWS_AS((void)t.column("missing"), ConfigError);
}

TEST_CASE("csv loader rejects ragged bodies") {
  CHECK_THROWS_AS((void)parse_csv("a,b\n1,2,3\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_csv(""), ConfigError);
  const CsvTable ok = parse_csv("# k=v\na,b\n1,2\n");
  CHECK(ok.rows.size() == 1);
}

TEST_CASE("config: preset form parses and serialization round-trips") {
  RunConfig c = parse_config(R"({"design": {"preset": "default-bilayer"}})");
  CHECK(c.design.name == "default-bilayer");
  const std::string text = serialize_config(c);
  const RunConfig c2 = parse_config(text);
  CHECK(equivalent(c, c2));
  CHECK(config_hash(c) == config_hash(c2));
  CHECK(config_hash(c).size() == 16);
}

TEST_CASE("config: full-layer form round-trips with study and protocol") {
  const char *text = R"({
    "design": {
      "name": "custom",
      "layers": [
        {"type": "separator"},
        {"type": "nmc622", "thickness_um": 44, "eps_e": 0.31, "eps_cbd": 0.11, "b": 1.6},
        {"type": "lfp", "thickness_um": 44, "eps_e": 0.263, "eps_cbd": 0.11, "b": 2.1}
      ],
      "j0_ce_A_m2": 200.0
    },
    "solver": {"nodes_per_region": 12, "radial_shells": 8},
    "protocol": {"steps": [{"mode": "cc-charge", "c_rate": 3, "time_limit_s": 1800}]},
    "study": {"type": "thickness-sweep", "total_thickness_um": [60, 88]},
    "output": {"directory": "/tmp/x", "snapshot_count": 5}
  })";
  RunConfig c = parse_config(text);
  CHECK(c.design.layers.size() == 3);
  CHECK(c.design.layers[1].rated_mAh_cm2_per_um == doctest::Approx(0.051938));
  CHECK(c.design.layers[2].rated_mAh_cm2_per_um == doctest::Approx(0.033101));
  CHECK(c.solver.nodes_per_region == 12);
  CHECK(c.protocol.steps.size() == 1);
  CHECK(c.study.type == "thickness-sweep");
  CHECK(c.output.snapshot_count == 5);
  const RunConfig c2 = parse_config(serialize_config(c));
  CHECK(equivalent(c, c2));
}

TEST_CASE("config: unknown keys are rejected with their path") {
  CHECK_THROWS_WITH_AS((void)parse_config(R"({"design": {"preset": "default-bilayer"}, "bogus": 1})"),
                       doctest::Contains("(root).bogus"), ConfigError);
  CHECK_THROWS_WITH_AS(
      (void)parse_config(R"({"design": {"preset": "default-bilayer", "typo": 2}})"),
      doctest::Contains("design.typo"), ConfigError);
  CHECK_THROWS_AS((void)parse_config("not json"), ConfigError);
  CHECK_THROWS_AS((void)parse_config(R"({"solver": {}})"), ConfigError); // no design
}

TEST_CASE("config: physical validation failures surface as config errors") {
  CHECK_THROWS_AS((void)parse_config(R"({"design": {"preset": "default-bilayer",
    "cutoff_upper_V": 2.0}})"), ConfigError);
  CHECK_THROWS_AS((void)parse_config(R"({"design": {"name": "x", "layers": [
    {"type": "separator"},
    {"type": "nmc622", "thickness_um": 44, "eps_e": 0.95, "eps_cbd": 0.11, "b": 1.6}
  ]}})"), ConfigError);
}

TEST_CASE("lithium inventory counts electrolyte and solid phases") {
  const CellDesign d = CellDesign::preset("default-bilayer");
  SolverConfig cfg;
  const Mesh mesh = build_mesh(d, cfg);
  const CellState s = initial_state(d, mesh, Direction::Charge);
  double expect = 0.0;
  for (const auto &l : d.layers) {
    expect += l.eps_e * 1000.0 * l.L;
    if (l.is_electrode())
      expect += l.eps_solid() * l.c_s_init_charge * l.L;
  }
  CHECK(lithium_inventory(d, mesh, s) == doctest::Approx(expect).epsilon(1e-12));
}
