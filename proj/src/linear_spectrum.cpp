#include "cqdw/linear_spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace cqdw {

namespace {

template <typename Vec>
Vec apply_tridiagonal(const TridiagonalOperator& op, const Vec& full) {
  const int m = op.size();
  if (full.size() != m + 2) throw InvalidArgument("TridiagonalOperator::apply: grid mismatch");
  Vec out = Vec::Zero(m + 2);
  for (int k = 0; k < m; ++k) {
    auto v = op.diagonal[k] * full[k + 1];
    if (k > 0) v += op.off_diagonal[k - 1] * full[k];
    if (k + 1 < m) v += op.off_diagonal[k] * full[k + 2];
    out[k + 1] = v;
  }
  return out;
}

}  // namespace

RealVector TridiagonalOperator::apply(const RealVector& full) const {
  return apply_tridiagonal(*this, full);
}

ComplexVector TridiagonalOperator::apply(const ComplexVector& full) const {
  return apply_tridiagonal(*this, full);
}

Eigen::MatrixXd TridiagonalOperator::dense() const {
  const int m = size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    a(k, k) = diagonal[k];
    if (k + 1 < m) {
      a(k, k + 1) = off_diagonal[k];
      a(k + 1, k) = off_diagonal[k];
    }
  }
  return a;
}

TridiagonalOperator discretize_operator(const Grid& grid, const PotentialParams& params) {
  params.validate();
  const int m = grid.interior_size();
  const double h2 = grid.spacing * grid.spacing;
  TridiagonalOperator op;
  op.diagonal.resize(m);
  op.off_diagonal = RealVector::Constant(std::max(m - 1, 0), -0.5 / h2);
  for (int k = 0; k < m; ++k) {
    op.diagonal[k] = 1.0 / h2 + potential_eval(params, grid.points[k + 1]);
  }
  return op;
}

std::vector<Eigenpair> lowest_eigenpairs(const Grid& grid, const TridiagonalOperator& op,
                                         int count) {
  const int m = op.size();
  if (count < 1 || count > m) throw InvalidArgument("lowest_eigenpairs: invalid count");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(op.diagonal, op.off_diagonal, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw EigensolverFailure("tridiagonal eigensolver did not converge",
                             std::numeric_limits<double>::infinity());
  }

  const int c = grid.center_index();
  std::vector<Eigenpair> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    RealVector mode = RealVector::Zero(grid.n_points);
    mode.segment(1, m) = solver.eigenvectors().col(k);
    mode /= std::sqrt(norm_squared(grid, mode));

    double orientation = 0.0;
    if (k == 0) {
      orientation = mode[c];
    } else if (k == 1) {
      orientation = mode[c + 1] - mode[c - 1];
    } else {
      for (int i = 0; i < grid.n_points && orientation == 0.0; ++i) {
        if (std::abs(mode[i]) > 1e-12) orientation = mode[i];
      }
    }
    if (orientation < 0.0) mode = -mode;

    const double energy = solver.eigenvalues()[k];
    const double residual = (op.apply(mode) - energy * mode).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-10)) {
      throw EigensolverFailure("eigenpair residual above 1e-10", residual);
    }
    out.push_back({energy, std::move(mode), residual});
  }
  return out;
}

LinearBasis rotated_basis(std::span<const Eigenpair> pairs) {
  if (pairs.size() != 2) throw InvalidArgument("rotated_basis: need exactly two eigenpairs");
  const auto& p0 = pairs[0];
  const auto& p1 = pairs[1];
  if (!(p0.energy < p1.energy)) {
    throw InvalidArgument("rotated_basis: eigenvalues must satisfy omega0 < omega1");
  }
  LinearBasis b;
  b.omega0 = p0.energy;
  b.omega1 = p1.energy;
  b.u0 = p0.mode;
  b.u1 = p1.mode;
  b.phi_left = (b.u0 - b.u1) / std::sqrt(2.0);
  b.phi_right = (b.u0 + b.u1) / std::sqrt(2.0);
  b.Omega = 0.5 * (b.omega0 + b.omega1);
  b.omega = 0.5 * (b.omega1 - b.omega0);
  return b;
}

LinearBasis compute_linear_basis(const Grid& grid, const PotentialParams& params) {
  const auto op = discretize_operator(grid, params);
  const auto pairs = lowest_eigenpairs(grid, op, 2);
  return rotated_basis(pairs);
}

}  // namespace cqdw
