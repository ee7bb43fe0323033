#pragma once

#include "cqdw/config.hpp"
#include "cqdw/stability.hpp"
#include "cqdw/two_mode.hpp"

#include <optional>
#include <vector>

namespace cqdw {

/// Model and linear basis built from one RunConfig.
struct Scenario {
  RunConfig config;
  NlsModel model;
  LinearBasis basis;
};

Scenario make_scenario(const RunConfig& config);

SymmetryClass branch_family(const std::string& name);

/// Small-N state on the parity branch emanating from u0 (symmetric) or u1.
StationaryState parity_seed(const Scenario& sc, SymmetryClass family);

/// A parity branch together with the asymmetric branches born at its
/// symmetry-breaking pitchforks.
struct BranchFamily {
  Branch parent;
  std::vector<Branch> daughters;
  std::vector<double> daughter_origin_mu;
};

/// Traces the parity branch and, if `follow_daughters`, one daughter from
/// every pitchfork whose critical vector is mainly the partner linear mode
/// (pitchforks reached as the merge point of an earlier daughter are skipped).
BranchFamily trace_family(const Scenario& sc, SymmetryClass family, bool follow_daughters);

/// Pitchforks with |<v, u_partner>| >= min_overlap, in branch order.
std::vector<BranchEvent> symmetry_breaking_events(const Branch& parent, double min_overlap = 0.5);

std::vector<BranchEvent> events_of(const Branch& branch, EventType type);

/// BdG unstable-eigenvalue count (reduced method) for every state.
std::vector<int> unstable_counts(const NlsModel& model, const Branch& branch);

/// Converged parity state at chemical potential mu, reached by continuing
/// the parity branch from its linear seed.
StationaryState parity_state_at(const Scenario& sc, SymmetryClass family, double mu);

/// Perturbed initial field per the config's dynamics section.
ComplexVector perturbed_initial(const Scenario& sc, const StationaryState& state);

/// Thresholds of the config's cubic kernel family; nullopt for the local
/// (delta) kernel, which is always case 1.
std::optional<RegimeThresholds> regime_thresholds(const Scenario& sc);

/// Reduction parameters at kernel range sigma (both kernels share it).
ModeParams mode_params_at(const Scenario& sc, double sigma,
                          const std::optional<RegimeThresholds>& thresholds);

/// Smallest sigma in [lo, hi] beyond which the antisymmetric pair of
/// critical norms no longer exists, by bisection; nullopt if the pair
/// exists at both ends or at neither.
std::optional<double> coalescence_sigma(const Scenario& sc,
                                        const std::optional<RegimeThresholds>& thresholds,
                                        double lo, double hi, double tolerance = 1e-4);

}  // namespace cqdw
