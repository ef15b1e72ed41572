#pragma once

#include "mdfn/protocol.hpp"
#include "mdfn/studio.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdfn {

/// Study section of a run configuration. `type` selects the study driver;
/// only the fields relevant to that type are consulted.
struct StudyConfig {
  std::string type = "none"; //!< none | sensitivity | thickness-sweep |
                             //!< ratio-sweep | mass-sweep | crate-curve |
                             //!< optimize | benchmark
  std::optional<double> equalization_target_mAh_cm2;
  std::vector<double> total_thickness_um; //!< thickness-sweep grid
  std::vector<double> nmc_fractions;      //!< ratio-sweep grid
  std::vector<double> c_rates;            //!< crate-curve grid
  std::vector<std::string> benchmark_presets;
  std::vector<CaseOverride> cases;        //!< sensitivity cases

  bool operator==(const StudyConfig &) const = default;
};

struct OutputConfig {
  std::string directory; //!< empty: environment default, then "./out"
  int snapshot_count = 20;

  bool operator==(const OutputConfig &) const = default;
};

/// A fully validated run configuration.
struct RunConfig {
  CellDesign design;
  SolverConfig solver;
  Protocol protocol; //!< empty steps: the CLI builds a single cc step
  StudyConfig study;
  OutputConfig output;
};

/// Environment variable consulted for the default output directory.
inline constexpr const char *kOutputDirEnvVar = "MDFN_OUT_DIR";

/// Parses and validates a JSON run configuration. Unknown keys are rejected
/// with their JSON path; physical-invariant violations carry the named
/// constraint. The design section accepts either a named preset (with
/// optional scalar overrides) or a full layer-by-layer description.
RunConfig parse_config(const std::string &text);

/// Reads a file and delegates to parse_config.
RunConfig load_config_file(const std::string &path);

/// Canonical JSON serialization; parse_config(serialize_config(c)) yields an
/// equivalent configuration field by field.
std::string serialize_config(const RunConfig &config);

/// Configuration for a named design preset with default solver/output
/// sections and no protocol/study.
RunConfig default_config(const std::string &design_preset);

/// FNV-1a hash of the canonical serialization, hex-encoded; recorded in
/// every output file for provenance.
std::string config_hash(const RunConfig &config);

/// Structural equality used by round-trip tests.
bool equivalent(const RunConfig &a, const RunConfig &b);

} // namespace mdfn
