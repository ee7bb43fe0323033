#pragma once

#include "cqdw/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cqdw {

enum class SymmetryClass { symmetric, antisymmetric, asymmetric };

std::string to_string(SymmetryClass c);

/// Reflection test: ||psi -+ psi(-x)|| / ||psi|| <= 1e-6 gives the parity
/// classes, anything else is asymmetric.
SymmetryClass classify_symmetry(const RealVector& psi);

struct StationaryState {
  RealVector psi;  // full grid, real
  double mu = 0.0;
  double norm = 0.0;
  SymmetryClass symmetry = SymmetryClass::symmetric;
  double residual = 0.0;  // max norm of the stationary residual
  int iterations = 0;
  double edge_amplitude = 0.0;  // max |psi| at the interior samples next to the walls
};

/// States whose edge amplitude exceeds this are too wide for the box.
inline constexpr double kEdgeTolerance = 1e-8;

struct NewtonOptions {
  double tolerance = 1e-11;  // max-norm residual
  int max_iterations = 30;
  bool allow_trivial = false;
};

class NewtonFailure : public std::runtime_error {
 public:
  NewtonFailure(const std::string& what, std::vector<double> history, bool trivial)
      : std::runtime_error(what), history_(std::move(history)), trivial_(trivial) {}
  const std::vector<double>& residual_history() const { return history_; }
  bool collapsed_to_trivial() const { return trivial_; }

 private:
  std::vector<double> history_;
  bool trivial_;
};

/// Real stationary residual L psi - mu psi + s (R1*psi^2) psi + d (R2*psi^4) psi.
RealVector stationary_residual(const NlsModel& model, const RealVector& psi, double mu);

StationaryState make_state(const NlsModel& model, RealVector psi, double mu, int iterations = 0);

/// Newton iteration at fixed mu with the full nonlocal Jacobian.
StationaryState newton_solve(const NlsModel& model, const RealVector& guess, double mu,
                             const NewtonOptions& options = {});

/// Small-amplitude state on the branch bifurcating from linear mode `mode`
/// (eigenvalue `omega_k`): psi = a mode with a chosen so N = target_norm and
/// mu from the leading-order shift, then Newton.
StationaryState seed_from_linear_mode(const NlsModel& model, const RealVector& mode,
                                      double omega_k, double target_norm = 1e-3,
                                      const NewtonOptions& options = {});

enum class EventType { pitchfork, fold, merge };

std::string to_string(EventType t);

struct BranchEvent {
  EventType type = EventType::fold;
  double mu = 0.0;
  double N = 0.0;
  int index = 0;  // the event lies between states index - 1 and index
  /// pitchfork only: |<v, u_partner>| for the unit critical vector v, where
  /// u_partner is the linear mode of the breaking parity.
  double partner_overlap = 0.0;
  RealVector critical_vector;  // pitchfork only, full grid, unit L2
  RealVector psi;              // refined state at the event (pitchfork, fold)
};

struct ContinuationOptions {
  double mu_min = -0.5;
  double mu_max = 0.6;
  double norm_max = 12.0;
  double ds_initial = 1e-2;
  double ds_min = 1e-3;
  double ds_max = 5e-2;
  int max_steps = 5000;
  /// Pitchfork refinement target on |delta mu|.
  double refine_tolerance = 1e-5;
  bool detect_pitchforks = true;
  /// Stop a daughter branch once it merges back into a parity branch.
  bool stop_at_merge = true;
  /// Optional initial direction in mu: +1 / -1, or 0 for the natural tangent.
  int initial_direction = 0;
  NewtonOptions newton;
};

struct Branch {
  std::vector<StationaryState> states;
  std::vector<BranchEvent> events;
  SymmetryClass family = SymmetryClass::symmetric;
  std::string termination;

  double max_edge_amplitude() const;
  bool edge_flagged() const { return max_edge_amplitude() > kEdgeTolerance; }
};

/// Pseudo-arclength continuation in mu. Parity branches are kept exactly
/// symmetric or antisymmetric and scanned for pitchforks and folds; on an
/// asymmetric branch folds and merges are reported.
Branch continue_branch(const NlsModel& model, const StationaryState& seed,
                       const ContinuationOptions& options,
                       const std::optional<RealVector>& direction = std::nullopt);

/// Smallest-magnitude eigenvalue of the Jacobian restricted to the parity
/// opposite to the state's own (real part), with its eigenvector.
struct BreakingMode {
  double eigenvalue = 0.0;
  RealVector vector;  // full grid, unit L2
  int negative_count = 0;
};
BreakingMode breaking_mode(const NlsModel& model, const StationaryState& state);

/// Pitchfork events of an already traced parity branch (the events stored
/// in `branch` by continue_branch, filtered).
std::vector<BranchEvent> detect_pitchfork(const Branch& branch);

/// Seeds the daughter branch at a pitchfork by solving F = 0 together with
/// <v, psi - psi_b> = kick, kick = 1e-3 ||psi_b|| doubled on each of up to
/// 10 retries until an asymmetric state results.
StationaryState switch_branch(const NlsModel& model, const BranchEvent& pitchfork,
                              const NewtonOptions& options = {});

/// Newton-converged state at chemical potential mu, started from a linear
/// interpolation between the first pair of branch states that brackets mu.
StationaryState state_at_mu(const NlsModel& model, const Branch& branch, double mu,
                            const NewtonOptions& options = {});

/// Attaches partner overlaps to pitchfork events given the partner mode.
void set_partner_overlaps(const NlsModel& model, Branch& branch, const RealVector& partner);

}  // namespace cqdw
