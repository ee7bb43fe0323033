#pragma once

#include "cqdw/grid.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace cqdw {

/// Second-order finite-difference form of -(1/2) d^2/dx^2 + V(x) with
/// homogeneous Dirichlet conditions, acting on the interior samples.
struct TridiagonalOperator {
  RealVector diagonal;      // interior_size entries
  RealVector off_diagonal;  // interior_size - 1 entries

  int size() const { return static_cast<int>(diagonal.size()); }
  /// Applies the operator to a full-grid field; end samples of the result are zero.
  RealVector apply(const RealVector& full) const;
  ComplexVector apply(const ComplexVector& full) const;
  Eigen::MatrixXd dense() const;
};

TridiagonalOperator discretize_operator(const Grid& grid, const PotentialParams& params);

struct Eigenpair {
  double energy = 0.0;
  RealVector mode;  // full grid, unit discrete L2 norm
  double residual = 0.0;  // max |L u - E u|
};

class EigensolverFailure : public std::runtime_error {
 public:
  EigensolverFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// The `count` lowest eigenpairs, sign fixed so u0(0) > 0 and u1'(0) > 0
/// (higher modes: first nonzero sample from the left positive).
std::vector<Eigenpair> lowest_eigenpairs(const Grid& grid, const TridiagonalOperator& op,
                                         int count);

struct LinearBasis {
  double omega0 = 0.0;
  double omega1 = 0.0;
  RealVector u0, u1;
  RealVector phi_left, phi_right;
  double Omega = 0.0;  // (omega0 + omega1) / 2
  double omega = 0.0;  // (omega1 - omega0) / 2
};

LinearBasis rotated_basis(std::span<const Eigenpair> pairs);

/// Grid + potential -> two-mode basis.
LinearBasis compute_linear_basis(const Grid& grid, const PotentialParams& params);

}  // namespace cqdw
