#include "mdfn/protocol.hpp"

#include "mdfn/errors.hpp"
#include "mdfn/state.hpp"

namespace mdfn {

const char *to_string(StepMode m) {
  switch (m) {
  case StepMode::CcCharge: return "cc-charge";
  case StepMode::CcDischarge: return "cc-discharge";
  case StepMode::Rest: return "rest";
  }
  return "?";
}

void Protocol::validate() const {
  if (steps.empty())
    throw ConfigError("protocol: needs at least one step");
  for (const auto &s : steps) {
    if (s.mode == StepMode::Rest) {
      if (!s.time_limit_s || !(*s.time_limit_s > 0.0))
        throw ConfigError("protocol: rest steps need a positive time limit");
      continue;
    }
    if (!(s.c_rate > 0.0))
      throw ConfigError("protocol: constant-current steps need c_rate > 0");
    if (!s.cutoff_voltage && !s.time_limit_s)
      throw ConfigError("protocol: constant-current steps need a stop condition");
  }
  if (i_1c_A && !(*i_1c_A > 0.0))
    throw ConfigError("protocol: explicit 1C current must be positive");
}

namespace {

ProtocolStep make_cc(StepMode mode, double c_rate) {
  ProtocolStep s;
  s.mode = mode;
  s.c_rate = c_rate;
  // cutoff filled from the design at run time; time limit guards runaways
  s.time_limit_s = 1.5 * 3600.0 / c_rate;
  return s;
}

} // namespace

Protocol Protocol::cc_charge(double c_rate) {
  Protocol p;
  p.steps.push_back(make_cc(StepMode::CcCharge, c_rate));
  return p;
}

Protocol Protocol::cc_discharge(double c_rate) {
  Protocol p;
  p.steps.push_back(make_cc(StepMode::CcDischarge, c_rate));
  return p;
}

Protocol Protocol::preset(const std::string &name) {
  Protocol p;
  if (name == "3c-x4") {
    for (int i = 0; i < 4; ++i) {
      p.steps.push_back(make_cc(StepMode::CcCharge, 3.0));
      p.steps.push_back(make_cc(StepMode::CcDischarge, 3.0));
    }
    return p;
  }
  if (name == "3c-01c-3c") {
    p.steps.push_back(make_cc(StepMode::CcCharge, 3.0));
    p.steps.push_back(make_cc(StepMode::CcDischarge, 0.1));
    p.steps.push_back(make_cc(StepMode::CcCharge, 3.0));
    return p;
  }
  throw ConfigError("unknown protocol preset '" + name + "'");
}

std::vector<std::string> Protocol::preset_names() { return {"3c-x4", "3c-01c-3c"}; }

std::vector<double> ProtocolResult::charge_capacities() const {
  std::vector<double> out;
  for (const auto &s : steps)
    if (s.mode == StepMode::CcCharge)
      out.push_back(s.capacity_mAh_cm2());
  return out;
}

std::vector<double> ProtocolResult::discharge_capacities() const {
  std::vector<double> out;
  for (const auto &s : steps)
    if (s.mode == StepMode::CcDischarge)
      out.push_back(s.capacity_mAh_cm2());
  return out;
}

ProtocolResult run_protocol(const CellDesign &design, const Protocol &protocol,
                            const SolverConfig &config) {
  design.validate();
  protocol.validate();
  config.validate();

  const double i1c = protocol.i_1c_A.value_or(design.i_1c_A());
  Mesh mesh = build_mesh(design, config);
  CellSolver solver(design, mesh, config);

  const Direction dir0 = protocol.steps.front().mode == StepMode::CcDischarge
                             ? Direction::Discharge
                             : Direction::Charge;
  CellState state = initial_state(design, mesh, dir0);

  ProtocolResult out;
  for (const auto &step : protocol.steps) {
    double current = 0.0;
    StopCondition stop;
    stop.time_limit_s = step.time_limit_s;
    if (step.mode == StepMode::CcCharge) {
      current = step.c_rate * i1c;
      stop.cutoff_voltage = step.cutoff_voltage.value_or(design.cutoff_upper);
    } else if (step.mode == StepMode::CcDischarge) {
      current = -step.c_rate * i1c;
      stop.cutoff_voltage = step.cutoff_voltage.value_or(design.cutoff_lower);
    }

    ProtocolStepResult sr;
    sr.mode = step.mode;
    sr.c_rate = step.c_rate;
    sr.sim = simulate_cc(solver, state, current, stop);
    const bool solver_failed = sr.sim.termination == Termination::SolverFailure;
    state = sr.sim.final_state;
    out.steps.push_back(std::move(sr));
    if (solver_failed) {
      out.failed = true;
      out.failure = "solver failure during step " + std::to_string(out.steps.size()) +
                    " (" + to_string(step.mode) + ")";
      break;
    }
  }
  return out;
}

} // namespace mdfn
