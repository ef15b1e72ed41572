#pragma once

#include "mdfn/simulate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mdfn {

enum class StepMode { CcCharge, CcDischarge, Rest };

const char *to_string(StepMode m);

/// One step of a multi-step protocol. Constant-current steps express their
/// magnitude as a C-rate (multiple of the design's rated 1C current) and must
/// carry at least one stop condition; rest steps need a time limit.
struct ProtocolStep {
  StepMode mode = StepMode::CcCharge;
  double c_rate = 0.0;                   //!< multiple of I_1C; > 0 for cc steps
  std::optional<double> cutoff_voltage;  //!< V; defaults to the design cutoffs
  std::optional<double> time_limit_s;
};

/// An ordered list of protocol steps plus an optional explicit 1C current.
struct Protocol {
  std::vector<ProtocolStep> steps;
  std::optional<double> i_1c_A; //!< overrides the design's rated 1C current

  void validate() const;

  /// Single constant-current charge at the given rate to the upper cutoff.
  static Protocol cc_charge(double c_rate);
  /// Single constant-current discharge at the given rate to the lower cutoff.
  static Protocol cc_discharge(double c_rate);
  /// Named cycling presets: "3c-x4" (four 3C charge/discharge cycles) and
  /// "3c-01c-3c" (3C charge, 0.1C discharge, 3C charge).
  static Protocol preset(const std::string &name);
  static std::vector<std::string> preset_names();
};

/// Result of one executed protocol step.
struct ProtocolStepResult {
  StepMode mode = StepMode::CcCharge;
  double c_rate = 0.0;
  SimulationResult sim;

  double capacity_mAh_cm2() const { return sim.capacity_mAh_cm2(); }
};

/// Result of a full protocol run. If a step fails mid-protocol the results up
/// to and including the failing step are kept and `failed` is set.
struct ProtocolResult {
  std::vector<ProtocolStepResult> steps;
  bool failed = false;
  std::string failure;

  /// Capacities of the charge steps, in execution order [mAh/cm^2].
  std::vector<double> charge_capacities() const;
  std::vector<double> discharge_capacities() const;
};

/// Executes the protocol steps sequentially, each starting from the previous
/// terminal state. The first step starts from charge or discharge
/// initialization according to its mode (rest-first protocols start from
/// charge initialization).
ProtocolResult run_protocol(const CellDesign &design, const Protocol &protocol,
                            const SolverConfig &config);

} // namespace mdfn
