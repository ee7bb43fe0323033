#pragma once

#include "cqdw/continuation.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace cqdw {

/// Linearization about a real stationary state psi0. Perturbations
/// psi0 + a e^{lambda t} + conj(b) e^{conj(lambda) t} satisfy
///   i lambda a =  L1 a + L2 b,   -i lambda b = L2 a + L1 b
/// with (D = diag psi0, K1 / K2 the cubic / quintic lattice matrices)
///   L1 = L - mu + diag(s K1 psi0^2 + d K2 psi0^4) + s D K1 D + 2 d D K2 D^3
///   L2 = s D K1 D + 2 d D K2 D^3.
/// The quintic exchange blocks are not symmetric.
struct BdgOperator {
  Eigen::MatrixXd L1, L2;  // interior blocks
  RealVector psi;          // interior samples of psi0
  SymmetryClass symmetry = SymmetryClass::asymmetric;

  /// [[L1, L2], [-L2, -L1]]; its eigenvalues are i lambda.
  Eigen::MatrixXd block() const;
};

BdgOperator build_bdg(const NlsModel& model, const StationaryState& state);

enum class BdgMethod {
  /// lambda^2 = -eig((L1 - L2)(L1 + L2)), split by parity when possible,
  /// with the phase-invariance pair deflated and reported as exact zeros
  reduced,
  /// eigenvalues of the 2m x 2m block operator, split by parity when possible
  block,
};

struct BdgOptions {
  BdgMethod method = BdgMethod::reduced;
  double threshold = 1e-6;
};

struct BdgSpectrum {
  std::vector<std::complex<double>> eigenvalues;  // lambda
  double max_real_part = 0.0;
  int unstable_count = 0;  // eigenvalues with Re lambda > threshold
  double min_abs = 0.0;    // smallest |lambda| (phase-invariance zero mode)
  double quartet_defect = 0.0;
  bool stable() const { return unstable_count == 0; }
};

class BdgFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BdgSpectrum solve_bdg(const BdgOperator& op, const BdgOptions& options = {});

/// Largest distance from any member of {-l, conj(l), -conj(l)} to the
/// spectrum, over all l.
double quartet_defect(const std::vector<std::complex<double>>& eigenvalues);

/// Most unstable eigenpair, as the t = 0 perturbation direction
/// u - i (L1 + L2) u / lambda for a real growth rate lambda; nullopt when no
/// real positive eigenvalue exceeds the threshold.
struct UnstableMode {
  double growth_rate = 0.0;
  ComplexVector perturbation;  // full grid, unit Euclidean norm
};
std::optional<UnstableMode> unstable_mode(const BdgOperator& op, double threshold = 1e-6);

struct LambdaComparison {
  double pde_rate = 0.0;        // max Re lambda
  double two_mode_rate = 0.0;   // sqrt(lambda^2) when positive, else 0
  double relative_difference = 0.0;
  bool classification_agrees = true;
};

LambdaComparison two_mode_lambda_check(const BdgSpectrum& spectrum, double two_mode_lambda_sq,
                                       double threshold = 1e-6);

}  // namespace cqdw
