#include "cqdw/model.hpp"

#include <cmath>

namespace cqdw {

void ModelParams::validate() const {
  if (grid.n_points < 3) throw InvalidArgument("ModelParams: grid not built");
  potential.validate();
  cubic.validate();
  quintic.validate();
  if (!(s == 1 || s == -1) || !(delta == 1 || delta == -1)) {
    throw InvalidArgument("ModelParams: s and delta must be +1 or -1");
  }
}

RealVector interior(const RealVector& full) { return full.segment(1, full.size() - 2); }

RealVector embed(const RealVector& inner_values) {
  RealVector full = RealVector::Zero(inner_values.size() + 2);
  full.segment(1, inner_values.size()) = inner_values;
  return full;
}

Eigen::MatrixXd parity_basis(int m, Parity parity) {
  const int half = m / 2;
  const bool has_center = (m % 2 == 1) && parity == Parity::even;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, half + (has_center ? 1 : 0));
  const double r = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < half; ++k) {
    b(k, k) = r;
    b(m - 1 - k, k) = parity == Parity::even ? r : -r;
  }
  if (has_center) b(half, half) = 1.0;
  return b;
}

Eigen::MatrixXd parity_block(const Eigen::MatrixXd& a, Parity parity) {
  const int m = static_cast<int>(a.rows());
  const int half = m / 2;
  const bool has_center = (m % 2 == 1) && parity == Parity::even;
  const int k = half + (has_center ? 1 : 0);
  const double sg = parity == Parity::even ? 1.0 : -1.0;
  Eigen::MatrixXd out(k, k);
  for (int j = 0; j < half; ++j) {
    const int jr = m - 1 - j;
    for (int i = 0; i < half; ++i) {
      const int ir = m - 1 - i;
      out(i, j) = 0.5 * (a(i, j) + sg * a(i, jr) + sg * a(ir, j) + a(ir, jr));
    }
  }
  if (has_center) {
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < half; ++i) {
      out(i, half) = r * (a(i, half) + a(m - 1 - i, half));
      out(half, i) = r * (a(half, i) + a(half, m - 1 - i));
    }
    out(half, half) = a(half, half);
  }
  return out;
}

RealVector parity_project(const RealVector& full, Parity parity) {
  const RealVector r = reflect(full);
  return parity == Parity::even ? RealVector(0.5 * (full + r)) : RealVector(0.5 * (full - r));
}

namespace {

Eigen::MatrixXd interior_block(const Convolver& c) {
  const Eigen::MatrixXd d = c.dense();
  const int m = c.size() - 2;
  return d.block(1, 1, m, m);
}

}  // namespace

NlsModel::NlsModel(ModelParams params)
    : params_(std::move(params)),
      op_(discretize_operator(params_.grid, params_.potential)),
      cubic_(params_.grid, params_.cubic),
      quintic_(params_.grid, params_.quintic) {
  params_.validate();
  k1_ = interior_block(cubic_);
  k2_ = interior_block(quintic_);
}

RealVector NlsModel::nonlinear_potential(const RealVector& density) const {
  RealVector w = params_.s * cubic_.apply(density);
  w += params_.delta * quintic_.apply(density.cwiseProduct(density));
  return w;
}

RealVector NlsModel::residual(const RealVector& psi, double mu) const {
  if (psi.size() != grid().n_points) throw InvalidArgument("residual: grid mismatch");
  const RealVector w = nonlinear_potential(psi.cwiseProduct(psi));
  RealVector r = op_.apply(psi) - mu * psi + w.cwiseProduct(psi);
  r[0] = 0.0;
  r[r.size() - 1] = 0.0;
  return r;
}

ComplexVector NlsModel::residual(const ComplexVector& psi, double mu) const {
  if (psi.size() != grid().n_points) throw InvalidArgument("residual: grid mismatch");
  const RealVector w = nonlinear_potential(psi.cwiseAbs2());
  ComplexVector r = op_.apply(psi) - mu * psi;
  for (int i = 1; i + 1 < r.size(); ++i) r[i] += w[i] * psi[i];
  r[0] = 0.0;
  r[r.size() - 1] = 0.0;
  return r;
}

Eigen::MatrixXd NlsModel::jacobian(const RealVector& psi, double mu) const {
  const RealVector p = interior(psi);
  const RealVector p2 = p.cwiseProduct(p);
  const RealVector p3 = p2.cwiseProduct(p);
  const RealVector w = interior(nonlinear_potential(psi.cwiseProduct(psi)));

  Eigen::MatrixXd j = op_.dense();
  j.diagonal().array() += w.array() - mu;
  // exchange terms: 2 s psi_i K1_ij psi_j + 4 delta psi_i K2_ij psi_j^3
  j.noalias() += (2.0 * params_.s) * p.asDiagonal() * k1_ * p.asDiagonal();
  j.noalias() += (4.0 * params_.delta) * p.asDiagonal() * k2_ * p3.asDiagonal();
  return j;
}

}  // namespace cqdw
