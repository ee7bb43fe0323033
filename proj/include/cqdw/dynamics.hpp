#pragma once

#include "cqdw/model.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cqdw {

struct EvolutionOptions {
  double dt = 5e-3;
  double sample_interval = 0.2;
  /// Fixed-point tolerance of the implicit midpoint stage (max norm).
  double stage_tolerance = 1e-13;
  int max_stage_iterations = 50;
  double norm_tolerance = 1e-8;
  bool keep_snapshots = true;
};

struct EvolutionRun {
  std::vector<double> times;
  std::vector<ComplexVector> snapshots;  // full grid; empty if not kept
  std::vector<double> norm_series;
  std::vector<double> imbalance_series;  // (N_left - N_right) / N of |psi|^2
  std::vector<double> breaking_series;   // ||psi -+ psi(-x)|| / 2 relative to the initial parity
  double max_norm_drift = 0.0;
};

class DynamicsFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Implicit midpoint rule for i psi_t + mu psi = L psi + W(|psi|^2) psi:
///   (1 + i dt/2 H) psi^{n+1} = (1 - i dt/2 H) psi^n,
///   H = L + diag W(|psi_mid|^2) - mu,  psi_mid = (psi^n + psi^{n+1}) / 2,
/// solved by fixed-point iteration on psi_mid. H is real symmetric
/// tridiagonal plus diagonal, so each stage is a unitary Cayley map: the
/// norm is conserved to rounding and stationary states are exact fixed
/// points. `parity` selects the reference class of breaking_series.
EvolutionRun evolve(const NlsModel& model, const ComplexVector& initial, double mu, double t_end,
                    const EvolutionOptions& options = {},
                    std::optional<Parity> parity = std::nullopt);

/// psi + eps ||psi|| xi / ||xi|| with xi complex Gaussian white noise on the
/// interior samples (seeded).
ComplexVector random_perturbation(const Grid& grid, const RealVector& psi, double relative_amplitude,
                                  std::uint64_t seed);

/// psi + eps ||psi|| v / ||v|| for a given direction v.
ComplexVector directed_perturbation(const Grid& grid, const RealVector& psi,
                                    const ComplexVector& direction, double relative_amplitude);

struct PhaseSample {
  double t = 0.0;
  double z = 0.0;
  double theta = 0.0;
  double outside_fraction = 0.0;  // 1 - N_proj / N
  bool theta_defined = true;
};

/// c_{L,R} = <phi_{L,R}, psi>, z = (|c_L|^2 - |c_R|^2) / N_proj,
/// theta = arg(c_L conj(c_R)) in (-pi, pi].
PhaseSample project_state(const Grid& grid, const RealVector& phi_left,
                          const RealVector& phi_right, const ComplexVector& psi, double t = 0.0);

std::vector<PhaseSample> project_phase_plane(const EvolutionRun& run, const Grid& grid,
                                             const RealVector& phi_left,
                                             const RealVector& phi_right);

/// First sample time with |imbalance| >= level, or nullopt.
std::optional<double> asymmetry_onset(const EvolutionRun& run, double level = 0.5);

struct GrowthFit {
  double rate = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  int samples = 0;
};

/// Least-squares slope of log(breaking_series) over samples with value in
/// [lower, upper].
GrowthFit fit_growth(const EvolutionRun& run, double lower, double upper);

/// Exact-difference scheme for m - d m_xx = S on the grid with free-space
/// (decaying) closure m_{-1} = r m_0, m_n = r m_{n-1}, r = exp(-h / sqrt d):
///   m_i - r/(1-r)^2 (m_{i+1} - 2 m_i + m_{i-1}) = S_i.
/// Its discrete Green's function is the lattice-normalized exponential kernel
/// of range sqrt(d), i.e. exp(-|x|/sqrt d) / (2 sqrt d) to O(h^2).
RealVector solve_screened_poisson(const Grid& grid, const RealVector& source, double d);

/// sigma0 (|u|^2 - |u|^4).
RealVector saturable_source(const ComplexVector& u, double sigma0);

/// Real symmetric tridiagonal solve (Thomas). diag.size() == rhs.size().
RealVector solve_tridiagonal(const RealVector& sub, const RealVector& diag, const RealVector& sup,
                             const RealVector& rhs);

}  // namespace cqdw
