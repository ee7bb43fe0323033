#pragma once

#include "cqdw/overlaps.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace cqdw {

/// Parameters of the reduced (z, theta) system.
///
/// `eta` is the coefficient that drives the imbalance dynamics: eta_0 in
/// case 1 and eta_0 - eta_1 otherwise. `eta_cross` is the retained eta_1
/// (zero in case 1) and enters amplitude-level formulas only.
struct ModeParams {
  int s = 1;
  int delta = -1;
  double N = 0.0;
  double eta = 0.0;
  double eta4 = 0.0;  // zero in case 3
  double eta_cross = 0.0;
  double omega = 0.0;
  double Omega = 0.0;
  double mu = 0.0;

  double eta0() const { return eta + eta_cross; }
  double eta_sum() const { return eta0() + eta_cross; }
  double omega0() const { return Omega - omega; }
  double omega1() const { return Omega + omega; }
  /// s eta N + delta eta4 N^2: the effective nonlinear coupling.
  double coupling() const { return coupling_at(N); }
  double coupling_at(double n) const { return s * eta * n + delta * eta4 * n * n; }
  void validate() const;
};

/// Truncates the overlap set according to its regime.
ModeParams make_mode_params(const OverlapSet& set, const LinearBasis& basis, int s, int delta,
                            double N = 1.0);

class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct TwoModeState {
  double z = 0.0;
  double theta = 0.0;
};

enum class FixedPointFamily { symmetric, antisymmetric, asymmetric };
enum class FixedPointType { center, saddle };

std::string to_string(FixedPointFamily f);
std::string to_string(FixedPointType t);

struct FixedPoint {
  TwoModeState state;
  FixedPointFamily family = FixedPointFamily::symmetric;
  FixedPointType type = FixedPointType::center;
  double lambda_sq = 0.0;
};

struct Rhs {
  double dz = 0.0;
  double dtheta = 0.0;
};

/// (2 w sqrt(1-z^2) sin th, -2 w z cos th / sqrt(1-z^2) - g z).
Rhs reduced_rhs(const TwoModeState& state, const ModeParams& p);

/// 2 w sqrt(1-z^2) cos th - (1/2) g z^2.
double hamiltonian(const TwoModeState& state, const ModeParams& p);

/// Position-momentum form: with momentum q = dz/dt, returns d^2z/dt^2
/// = -4 w^2 z - g z sgn(cos th) sqrt(4 w^2 (1 - z^2) - q^2).
double position_momentum_accel(double z, double q, double cos_theta_sign, const ModeParams& p);

/// Asymmetric fixed points (+z, -z). The phase is pi when g > 0 and 0 when
/// g < 0, the only section where the z-equation balances. Empty when
/// z^2 < 0.
std::vector<TwoModeState> asymmetric_z(const ModeParams& p);

/// z^2 of the asymmetric points, possibly negative.
double asymmetric_z_squared(const ModeParams& p);

struct CriticalNorms {
  std::optional<double> N0cr, N1cr, N2cr, N3cr;
  int discarded = 0;  // complex or non-positive roots
};

/// Norms at which asymmetric points reach z = 0. The pair (N0, N1) solves
/// g(N) = -2 s w, the pair (N2, N3) solves g(N) = +2 s w, each pair sorted
/// ascending. With eta4 = 0 each pair has one root, stored in N0 / N2.
CriticalNorms critical_norms(const ModeParams& p);

/// The parent family that the roots of g(N) = target attach to.
FixedPointFamily parent_for_coupling_sign(double g);

/// Linear stability of a fixed point. Rejects states whose rhs residual
/// exceeds 1e-10.
FixedPoint fixed_point_stability(const FixedPoint& fp, const ModeParams& p);

/// All fixed points in the theta in {0, pi} sections with their stability.
std::vector<FixedPoint> census(const ModeParams& p);

struct AmplitudeSolution {
  double rho_left_sq = 0.0;
  double rho_right_sq = 0.0;
  double N = 0.0;
};

/// Symmetric (c_L = c_R) or antisymmetric (c_L = -c_R) stationary
/// amplitudes at chemical potential p.mu. Both regimes use eta_sum.
std::vector<AmplitudeSolution> stationary_amplitudes(const ModeParams& p,
                                                     FixedPointFamily family);

/// Upper (or lower) bound of mu for which `stationary_amplitudes` has real
/// roots; nullopt when unbounded.
std::optional<double> amplitude_mu_bound(const ModeParams& p, FixedPointFamily family);

/// Residuals of the stationary projected equations for real (c_L, c_R).
std::pair<double, double> projected_residual(double c_left, double c_right, const ModeParams& p);

/// Parent-branch chemical potential at norm n.
double parent_mu(const ModeParams& p, FixedPointFamily family, double n);

struct NormPolynomial {
  std::vector<double> coefficients;  // ascending powers of N
  std::vector<double> roots;         // accepted real roots
  int discarded = 0;
};

/// Quartic in N for asymmetric stationary states at chemical potential p.mu:
///   (d e4 N^2 + s e0 N - (mu - Omega)) (d e4 N + s eta)^2 - d e4 w^2 = 0.
/// Accepted roots are real, positive and satisfy g^2 >= 4 w^2.
NormPolynomial asymmetric_norm_polynomial(const ModeParams& p);

struct OrbitSample {
  double t = 0.0;
  double z = 0.0;
  double theta = 0.0;
  double q = 0.0;  // dz/dt
  double energy = 0.0;
};

struct Orbit {
  std::vector<OrbitSample> samples;
  double max_relative_drift = 0.0;
  int halvings = 0;
};

/// RK4 with a per-step energy monitor: a step whose energy error exceeds
/// 1e-8 * max(|H0|, 2w) is redone with halved substeps. Samples every dt.
Orbit integrate_orbit(const TwoModeState& initial, const ModeParams& p, double t_end, double dt);

struct PredictedEvent {
  FixedPointFamily parent = FixedPointFamily::symmetric;
  double N = 0.0;
  double mu = 0.0;
  std::string label;  // N0cr .. N3cr
};

/// Parent-branch mu at every present critical norm.
std::vector<PredictedEvent> predicted_bifurcations(const ModeParams& p);

}  // namespace cqdw
