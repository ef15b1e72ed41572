#include "mdfn/config.hpp"

#include "mdfn/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mdfn {

namespace {

using nlohmann::json;

void check_keys(const json &j, std::initializer_list<const char *> allowed,
                const std::string &ctx) {
  if (!j.is_object())
    throw ConfigError("config: '" + ctx + "' must be an object");
  for (const auto &item : j.items()) {
    bool ok = false;
    for (const char *a : allowed)
      if (item.key() == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("config: unknown key '" + ctx + "." + item.key() + "'");
  }
}

double get_num(const json &j, const char *key, const std::string &ctx) {
  if (!j.contains(key))
    throw ConfigError("config: missing '" + ctx + "." + key + "'");
  if (!j[key].is_number())
    throw ConfigError("config: '" + ctx + "." + key + "' must be a number");
  return j[key].get<double>();
}

double get_num_or(const json &j, const char *key, double fallback) {
  return j.contains(key) ? j[key].get<double>() : fallback;
}

LayerSpec parse_layer(const json &j, const std::string &ctx) {
  check_keys(j,
             {"type", "thickness_um", "eps_e", "eps_cbd", "b", "sigma_s",
              "c_s_init_charge", "c_s_init_discharge", "rho_am_kg_m3",
              "rated_mAh_cm2_per_um"},
             ctx);
  if (!j.contains("type") || !j["type"].is_string())
    throw ConfigError("config: '" + ctx + ".type' must be one of separator|nmc622|lfp");
  const std::string type = j["type"].get<std::string>();

  LayerSpec l;
  if (type == "separator") {
    l.L = get_num_or(j, "thickness_um", 16.0) * 1e-6;
    l.eps_e = get_num_or(j, "eps_e", 0.45);
    l.b = get_num_or(j, "b", 1.5);
    l.eps_cbd = 0.0;
    l.sigma_s = 0.0;
    return l;
  }
  const bool is_nmc = type == "nmc622";
  if (!is_nmc && type != "lfp")
    throw ConfigError("config: '" + ctx + ".type' must be one of separator|nmc622|lfp");
  l.chemistry = is_nmc ? ChemistrySpec::nmc622() : ChemistrySpec::lfp();
  l.L = get_num(j, "thickness_um", ctx) * 1e-6;
  l.eps_e = get_num(j, "eps_e", ctx);
  l.eps_cbd = get_num(j, "eps_cbd", ctx);
  l.b = get_num(j, "b", ctx);
  l.sigma_s = get_num_or(j, "sigma_s", 5.0);
  l.c_s_init_charge = get_num_or(j, "c_s_init_charge", is_nmc ? 44868.0 : 22751.0);
  l.c_s_init_discharge = get_num_or(j, "c_s_init_discharge", is_nmc ? 13366.0 : 29.0);
  l.rho_am = get_num_or(j, "rho_am_kg_m3", is_nmc ? 4600.0 : 3400.0);
  l.rated_mAh_cm2_per_um =
      get_num_or(j, "rated_mAh_cm2_per_um", rerated_density(is_nmc, l.eps_cbd));
  return l;
}

json layer_to_json(const LayerSpec &l) {
  json j;
  if (!l.is_electrode()) {
    j["type"] = "separator";
    j["thickness_um"] = l.L * 1e6;
    j["eps_e"] = l.eps_e;
    j["b"] = l.b;
    return j;
  }
  j["type"] = l.chemistry->name == "NMC622" ? "nmc622" : "lfp";
  j["thickness_um"] = l.L * 1e6;
  j["eps_e"] = l.eps_e;
  j["eps_cbd"] = l.eps_cbd;
  j["b"] = l.b;
  j["sigma_s"] = l.sigma_s;
  j["c_s_init_charge"] = l.c_s_init_charge;
  j["c_s_init_discharge"] = l.c_s_init_discharge;
  j["rho_am_kg_m3"] = l.rho_am;
  j["rated_mAh_cm2_per_um"] = l.rated_mAh_cm2_per_um;
  return j;
}

CellDesign parse_design(const json &j) {
  CellDesign d;
  if (j.contains("preset")) {
    check_keys(j,
               {"preset", "j0_ce_A_m2", "area_m2", "R_contact_ohm_m2", "cutoff_upper_V",
                "cutoff_lower_V", "mass_g"},
               "design");
    d = CellDesign::preset(j["preset"].get<std::string>());
  } else {
    check_keys(j,
               {"name", "layers", "electrolyte", "area_m2", "R_contact_ohm_m2",
                "j0_ce_A_m2", "cutoff_upper_V", "cutoff_lower_V", "rho_cbd_kg_m3",
                "mass_g"},
               "design");
    if (!j.contains("layers") || !j["layers"].is_array())
      throw ConfigError("config: 'design.layers' array is required (or use 'design.preset')");
    d.name = j.value("name", std::string("custom"));
    int i = 0;
    for (const auto &lj : j["layers"])
      d.layers.push_back(parse_layer(lj, "design.layers[" + std::to_string(i++) + "]"));
    d.electrolyte = ElectrolyteSpec::lipf6_valoen_reimers();
    if (j.contains("electrolyte")) {
      const auto &ej = j["electrolyte"];
      check_keys(ej, {"correlation", "c_e0_mol_m3"}, "design.electrolyte");
      const std::string corr = ej.value("correlation", std::string("lipf6-valoen-reimers"));
      if (corr != "lipf6-valoen-reimers")
        throw ConfigError("config: unknown electrolyte correlation '" + corr + "'");
      d.electrolyte.c_e0 = get_num_or(ej, "c_e0_mol_m3", d.electrolyte.c_e0);
    }
    d.rho_cbd = get_num_or(j, "rho_cbd_kg_m3", d.rho_cbd);
  }
  d.area = get_num_or(j, "area_m2", d.area);
  d.R_contact = get_num_or(j, "R_contact_ohm_m2", d.R_contact);
  d.j0_ce = get_num_or(j, "j0_ce_A_m2", d.j0_ce);
  d.cutoff_upper = get_num_or(j, "cutoff_upper_V", d.cutoff_upper);
  d.cutoff_lower = get_num_or(j, "cutoff_lower_V", d.cutoff_lower);
  if (j.contains("mass_g"))
    d.mass_override_g = j["mass_g"].get<double>();
  d.validate();
  return d;
}

json design_to_json(const CellDesign &d) {
  json j;
  j["name"] = d.name;
  j["layers"] = json::array();
  for (const auto &l : d.layers)
    j["layers"].push_back(layer_to_json(l));
  j["electrolyte"] = {{"correlation", d.electrolyte.correlation},
                      {"c_e0_mol_m3", d.electrolyte.c_e0}};
  j["area_m2"] = d.area;
  j["R_contact_ohm_m2"] = d.R_contact;
  j["j0_ce_A_m2"] = d.j0_ce;
  j["cutoff_upper_V"] = d.cutoff_upper;
  j["cutoff_lower_V"] = d.cutoff_lower;
  j["rho_cbd_kg_m3"] = d.rho_cbd;
  if (d.mass_override_g)
    j["mass_g"] = *d.mass_override_g;
  return j;
}

SolverConfig parse_solver(const json &j) {
  check_keys(j,
             {"nodes_per_region", "radial_shells", "newton_tol", "max_newton_iters",
              "dt_initial_s", "dt_min_s", "dt_max_s", "cutoff_bisection_tol_V",
              "snapshot_count"},
             "solver");
  SolverConfig s;
  s.nodes_per_region = static_cast<int>(get_num_or(j, "nodes_per_region", s.nodes_per_region));
  s.radial_shells = static_cast<int>(get_num_or(j, "radial_shells", s.radial_shells));
  s.newton_tol = get_num_or(j, "newton_tol", s.newton_tol);
  s.max_newton_iters = static_cast<int>(get_num_or(j, "max_newton_iters", s.max_newton_iters));
  s.dt_initial = get_num_or(j, "dt_initial_s", s.dt_initial);
  s.dt_min = get_num_or(j, "dt_min_s", s.dt_min);
  s.dt_max = get_num_or(j, "dt_max_s", s.dt_max);
  s.cutoff_bisection_tol = get_num_or(j, "cutoff_bisection_tol_V", s.cutoff_bisection_tol);
  s.snapshot_count = static_cast<int>(get_num_or(j, "snapshot_count", s.snapshot_count));
  s.validate();
  return s;
}

json solver_to_json(const SolverConfig &s) {
  return {{"nodes_per_region", s.nodes_per_region},
          {"radial_shells", s.radial_shells},
          {"newton_tol", s.newton_tol},
          {"max_newton_iters", s.max_newton_iters},
          {"dt_initial_s", s.dt_initial},
          {"dt_min_s", s.dt_min},
          {"dt_max_s", s.dt_max},
          {"cutoff_bisection_tol_V", s.cutoff_bisection_tol},
          {"snapshot_count", s.snapshot_count}};
}

StepMode parse_mode(const std::string &m, const std::string &ctx) {
  if (m == "cc-charge")
    return StepMode::CcCharge;
  if (m == "cc-discharge")
    return StepMode::CcDischarge;
  if (m == "rest")
    return StepMode::Rest;
  throw ConfigError("config: '" + ctx + ".mode' must be cc-charge|cc-discharge|rest");
}

Protocol parse_protocol(const json &j) {
  if (j.contains("preset")) {
    check_keys(j, {"preset"}, "protocol");
    return Protocol::preset(j["preset"].get<std::string>());
  }
  check_keys(j, {"steps", "i_1c_mA"}, "protocol");
  Protocol p;
  if (j.contains("i_1c_mA"))
    p.i_1c_A = j["i_1c_mA"].get<double>() * 1e-3;
  if (j.contains("steps")) {
    int i = 0;
    for (const auto &sj : j["steps"]) {
      const std::string ctx = "protocol.steps[" + std::to_string(i++) + "]";
      check_keys(sj, {"mode", "c_rate", "cutoff_voltage_V", "time_limit_s"}, ctx);
      ProtocolStep s;
      s.mode = parse_mode(sj.value("mode", std::string("cc-charge")), ctx);
      s.c_rate = get_num_or(sj, "c_rate", 0.0);
      if (sj.contains("cutoff_voltage_V"))
        s.cutoff_voltage = sj["cutoff_voltage_V"].get<double>();
      if (sj.contains("time_limit_s"))
        s.time_limit_s = sj["time_limit_s"].get<double>();
      p.steps.push_back(s);
    }
  }
  if (!p.steps.empty())
    p.validate();
  return p;
}

json protocol_to_json(const Protocol &p) {
  json j;
  if (p.i_1c_A)
    j["i_1c_mA"] = *p.i_1c_A * 1e3;
  j["steps"] = json::array();
  for (const auto &s : p.steps) {
    json sj;
    sj["mode"] = to_string(s.mode);
    sj["c_rate"] = s.c_rate;
    if (s.cutoff_voltage)
      sj["cutoff_voltage_V"] = *s.cutoff_voltage;
    if (s.time_limit_s)
      sj["time_limit_s"] = *s.time_limit_s;
    j["steps"].push_back(sj);
  }
  return j;
}

StudyConfig parse_study(const json &j) {
  check_keys(j,
             {"type", "equalization_target_mAh_cm2", "total_thickness_um",
              "nmc_fractions", "c_rates", "benchmark_presets", "cases"},
             "study");
  StudyConfig s;
  s.type = j.value("type", std::string("none"));
  const bool known =
      s.type == "none" || s.type == "sensitivity" || s.type == "thickness-sweep" ||
      s.type == "ratio-sweep" || s.type == "mass-sweep" || s.type == "crate-curve" ||
      s.type == "optimize" || s.type == "benchmark";
  if (!known)
    throw ConfigError("config: unknown study type '" + s.type + "'");
  if (j.contains("equalization_target_mAh_cm2"))
    s.equalization_target_mAh_cm2 = j["equalization_target_mAh_cm2"].get<double>();
  if (j.contains("total_thickness_um"))
    s.total_thickness_um = j["total_thickness_um"].get<std::vector<double>>();
  if (j.contains("nmc_fractions"))
    s.nmc_fractions = j["nmc_fractions"].get<std::vector<double>>();
  if (j.contains("c_rates"))
    s.c_rates = j["c_rates"].get<std::vector<double>>();
  if (j.contains("benchmark_presets"))
    s.benchmark_presets = j["benchmark_presets"].get<std::vector<std::string>>();
  if (j.contains("cases")) {
    int i = 0;
    for (const auto &cj : j["cases"]) {
      const std::string ctx = "study.cases[" + std::to_string(i++) + "]";
      check_keys(cj, {"id", "layers"}, ctx);
      CaseOverride c;
      c.id = cj.value("id", ctx);
      if (cj.contains("layers")) {
        int k = 0;
        for (const auto &lj : cj["layers"]) {
          const std::string lctx = ctx + ".layers[" + std::to_string(k++) + "]";
          check_keys(lj, {"thickness_um", "eps_e", "eps_cbd", "b"}, lctx);
          LayerOverride ov;
          if (lj.contains("thickness_um"))
            ov.L_um = lj["thickness_um"].get<double>();
          if (lj.contains("eps_e"))
            ov.eps_e = lj["eps_e"].get<double>();
          if (lj.contains("eps_cbd"))
            ov.eps_cbd = lj["eps_cbd"].get<double>();
          if (lj.contains("b"))
            ov.b = lj["b"].get<double>();
          c.layers.push_back(ov);
        }
      }
      s.cases.push_back(std::move(c));
    }
  }
  return s;
}

json study_to_json(const StudyConfig &s) {
  json j;
  j["type"] = s.type;
  if (s.equalization_target_mAh_cm2)
    j["equalization_target_mAh_cm2"] = *s.equalization_target_mAh_cm2;
  if (!s.total_thickness_um.empty())
    j["total_thickness_um"] = s.total_thickness_um;
  if (!s.nmc_fractions.empty())
    j["nmc_fractions"] = s.nmc_fractions;
  if (!s.c_rates.empty())
    j["c_rates"] = s.c_rates;
  if (!s.benchmark_presets.empty())
    j["benchmark_presets"] = s.benchmark_presets;
  if (!s.cases.empty()) {
    j["cases"] = json::array();
    for (const auto &c : s.cases) {
      json cj;
      cj["id"] = c.id;
      cj["layers"] = json::array();
      for (const auto &ov : c.layers) {
        json lj = json::object();
        if (ov.L_um)
          lj["thickness_um"] = *ov.L_um;
        if (ov.eps_e)
          lj["eps_e"] = *ov.eps_e;
        if (ov.eps_cbd)
          lj["eps_cbd"] = *ov.eps_cbd;
        if (ov.b)
          lj["b"] = *ov.b;
        cj["layers"].push_back(lj);
      }
      j["cases"].push_back(cj);
    }
  }
  return j;
}

} // namespace

RunConfig parse_config(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, {"design", "solver", "protocol", "study", "output"}, "(root)");
  if (!j.contains("design"))
    throw ConfigError("config: required sections: design (solver, protocol, study, "
                      "output are optional)");
  RunConfig cfg;
  cfg.design = parse_design(j["design"]);
  if (j.contains("solver"))
    cfg.solver = parse_solver(j["solver"]);
  if (j.contains("protocol"))
    cfg.protocol = parse_protocol(j["protocol"]);
  if (j.contains("study"))
    cfg.study = parse_study(j["study"]);
  if (j.contains("output")) {
    check_keys(j["output"], {"directory", "snapshot_count"}, "output");
    cfg.output.directory = j["output"].value("directory", std::string());
    cfg.output.snapshot_count =
        static_cast<int>(get_num_or(j["output"], "snapshot_count", cfg.output.snapshot_count));
  }
  return cfg;
}

RunConfig load_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig &config) {
  json j;
  j["design"] = design_to_json(config.design);
  j["solver"] = solver_to_json(config.solver);
  j["protocol"] = protocol_to_json(config.protocol);
  j["study"] = study_to_json(config.study);
  j["output"] = {{"directory", config.output.directory},
                 {"snapshot_count", config.output.snapshot_count}};
  return j.dump(2);
}

RunConfig default_config(const std::string &design_preset) {
  RunConfig cfg;
  cfg.design = CellDesign::preset(design_preset);
  return cfg;
}

std::string config_hash(const RunConfig &config) {
  const std::string s = serialize_config(config);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool equivalent(const RunConfig &a, const RunConfig &b) {
  return serialize_config(a) == serialize_config(b);
}

} // namespace mdfn
