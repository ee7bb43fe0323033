#pragma once

#include "cqdw/pipeline.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace cqdw {

/// One regression target. `provenance` says where the reference value was
/// reported.
struct Expectation {
  std::string quantity;
  double value = 0.0;
  double tolerance = 0.0;
  std::string provenance;
};

struct ScenarioPreset {
  std::string name;
  std::string description;
  /// Subcommand whose artifacts hold the data for this preset's figure.
  std::string command;
  RunConfig config;
  std::vector<Expectation> expected;
};

const std::vector<ScenarioPreset>& builtin_presets();
/// Throws InvalidArgument for an unknown name.
const ScenarioPreset& find_preset(const std::string& name);

class UnknownQuantity : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Lazily computed, cached pipeline products for one config. Quantities
/// are addressed by name (see `quantity_names`).
class Workbench {
 public:
  explicit Workbench(RunConfig config);

  const RunConfig& config() const { return config_; }
  const Scenario& scenario();
  const std::optional<RegimeThresholds>& thresholds();
  RegimeThresholds thresholds_for(KernelFamily family);
  const ModeParams& mode_params();
  const BranchFamily& family(SymmetryClass parity);
  const StationaryState& evolution_state();
  const EvolutionRun& evolution();

  double measure(const std::string& quantity);

 private:
  RunConfig config_;
  std::unique_ptr<Scenario> scenario_;
  std::optional<std::optional<RegimeThresholds>> thresholds_;
  std::map<KernelFamily, RegimeThresholds> by_family_;
  std::optional<ModeParams> mode_params_;
  std::map<SymmetryClass, BranchFamily> families_;
  std::optional<StationaryState> evolution_state_;
  std::optional<EvolutionRun> evolution_;
};

std::vector<std::string> quantity_names();

enum class CheckStatus { pass, fail, error };

std::string to_string(CheckStatus s);

struct CheckRow {
  Expectation expected;
  double measured = 0.0;
  CheckStatus status = CheckStatus::error;
  std::string detail;  // error message for ERROR rows
};

struct RegressionReport {
  std::string preset;
  std::vector<CheckRow> rows;
  std::vector<std::string> warnings;
  CheckStatus overall = CheckStatus::pass;
};

/// Measures each expected quantity and compares within tolerance. A
/// pipeline exception marks the quantities that needed it ERROR.
RegressionReport regress(const ScenarioPreset& preset, Workbench& bench);
RegressionReport regress(const ScenarioPreset& preset);

std::string format_report(const RegressionReport& r);

}  // namespace cqdw
