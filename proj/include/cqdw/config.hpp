#pragma once

#include "cqdw/continuation.hpp"
#include "cqdw/dynamics.hpp"
#include "cqdw/kernel.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cqdw {

/// Every violated field, one message each.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct KernelConfig {
  std::string family = "gaussian";
  double sigma = 1.0;
};

enum class PerturbationKind { none, random, eigenvector };

std::string to_string(PerturbationKind k);

/// Complete description of one run. Field names follow the JSON layout:
///
///   {"grid": {"half_width", "spacing"},
///    "potential": {"trap_strength", "barrier_height", "barrier_width"},
///    "kernels": {"cubic": {"family", "sigma"}, "quintic": {...}},
///    "signs": {"s", "delta"},
///    "continuation": {"branch", "mu_min", "mu_max", "norm_max", "ds_initial",
///                     "ds_min", "ds_max", "max_steps", "follow_daughters"},
///    "newton": {"tolerance", "max_iterations"},
///    "twomode": {"norm", "norm_max", "samples", "orbit_time", "orbit_steps"},
///    "dynamics": {"mu", "branch", "t_end", "dt", "sample_interval",
///                 "snapshot_interval", "perturbation", "amplitude", "seed"},
///    "thermal": {"d", "sigma0", "sources"}}
///
/// Missing keys keep their defaults; unknown keys are violations.
struct RunConfig {
  double half_width = 20.0;
  double spacing = 0.1;
  PotentialParams potential;
  KernelConfig cubic;
  KernelConfig quintic;
  int s = 1;
  int delta = -1;

  std::string branch = "both";
  double mu_min = -0.5;
  double mu_max = 0.6;
  double norm_max = 8.0;
  double ds_initial = 1e-2;
  double ds_min = 1e-3;
  double ds_max = 5e-2;
  int max_steps = 5000;
  bool follow_daughters = true;

  double newton_tolerance = 1e-11;
  int newton_max_iterations = 30;

  double twomode_norm = 5.0;  // phase portrait
  double twomode_norm_max = 6.0;
  int twomode_samples = 601;
  double orbit_time = 200.0;
  int orbit_steps = 20000;

  double evolve_mu = 0.19;
  std::string evolve_branch = "antisymmetric";
  double t_end = 300.0;
  double dt = 5e-3;
  double sample_interval = 0.2;
  double snapshot_interval = 1.0;
  PerturbationKind perturbation = PerturbationKind::eigenvector;
  double amplitude = 1e-3;
  std::uint64_t seed = 42;

  double thermal_d = 1.0;
  double thermal_sigma0 = 1.0;
  int thermal_sources = 5;

  /// Throws ConfigError listing every violation.
  void validate() const;

  Kernel cubic_kernel() const;
  Kernel quintic_kernel() const;
  Grid grid() const;
  ModelParams model_params() const;
  ContinuationOptions continuation_options() const;
  NewtonOptions newton_options() const;
  EvolutionOptions evolution_options() const;
};

/// Parses and validates; throws ConfigError (all violations) or io::IoError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

/// 64-bit FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace cqdw
