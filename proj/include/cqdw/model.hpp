#pragma once

#include "cqdw/kernel.hpp"
#include "cqdw/linear_spectrum.hpp"

namespace cqdw {

struct ModelParams {
  Grid grid;
  PotentialParams potential;
  Kernel cubic = Kernel::gaussian(1.0);    // R_1
  Kernel quintic = Kernel::gaussian(1.0);  // R_2
  int s = 1;
  int delta = -1;

  void validate() const;
};

/// Discrete nonlocal cubic-quintic NLS
///   i psi_t + mu psi = L psi + s (R_1 * |psi|^2) psi + delta (R_2 * |psi|^4) psi
/// on a Dirichlet grid. Fields are full-grid vectors with zero end samples;
/// matrices act on the interior samples.
class NlsModel {
 public:
  explicit NlsModel(ModelParams params);

  const ModelParams& params() const { return params_; }
  const Grid& grid() const { return params_.grid; }
  const TridiagonalOperator& linear_operator() const { return op_; }
  const Convolver& cubic() const { return cubic_; }
  const Convolver& quintic() const { return quintic_; }
  int interior_size() const { return op_.size(); }

  /// s R_1 * rho + delta R_2 * rho^2 for a density rho.
  RealVector nonlinear_potential(const RealVector& density) const;

  RealVector residual(const RealVector& psi, double mu) const;
  ComplexVector residual(const ComplexVector& psi, double mu) const;

  /// d residual / d psi for real psi, interior block, dense.
  Eigen::MatrixXd jacobian(const RealVector& psi, double mu) const;

  /// Interior blocks of the R_1 / R_2 lattice matrices.
  const Eigen::MatrixXd& cubic_matrix() const { return k1_; }
  const Eigen::MatrixXd& quintic_matrix() const { return k2_; }

  double norm(const RealVector& psi) const { return norm_squared(grid(), psi); }

 private:
  ModelParams params_;
  TridiagonalOperator op_;
  Convolver cubic_;
  Convolver quintic_;
  Eigen::MatrixXd k1_, k2_;
};

/// Interior samples of a full-grid vector, and the inverse embedding.
RealVector interior(const RealVector& full);
RealVector embed(const RealVector& inner_values);

enum class Parity { even, odd };

/// Orthonormal (Euclidean) basis of the even or odd subspace of R^m under
/// index reversal, one column per vector.
Eigen::MatrixXd parity_basis(int m, Parity parity);

/// Q^T A Q for Q = parity_basis(A.rows(), parity), in O(m^2).
Eigen::MatrixXd parity_block(const Eigen::MatrixXd& a, Parity parity);

/// (f +- f(-x)) / 2 on a full-grid vector.
RealVector parity_project(const RealVector& full, Parity parity);

}  // namespace cqdw
