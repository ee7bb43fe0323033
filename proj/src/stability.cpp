#include "cqdw/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cqdw {

Eigen::MatrixXd BdgOperator::block() const {
  const Eigen::Index m = L1.rows();
  Eigen::MatrixXd b(2 * m, 2 * m);
  b.topLeftCorner(m, m) = L1;
  b.topRightCorner(m, m) = L2;
  b.bottomLeftCorner(m, m) = -L2;
  b.bottomRightCorner(m, m) = -L1;
  return b;
}

BdgOperator build_bdg(const NlsModel& model, const StationaryState& state) {
  if (state.psi.size() != model.grid().n_points) throw InvalidArgument("build_bdg: grid mismatch");
  const int s = model.params().s;
  const int d = model.params().delta;
  const RealVector p = interior(state.psi);
  const RealVector p3 = p.cwiseProduct(p).cwiseProduct(p);
  const RealVector w = interior(model.nonlinear_potential(state.psi.cwiseProduct(state.psi)));

  BdgOperator op;
  op.symmetry = state.symmetry;
  op.psi = p;
  op.L2 = double(s) * p.asDiagonal() * model.cubic_matrix() * p.asDiagonal();
  op.L2 += (2.0 * d) * p.asDiagonal() * model.quintic_matrix() * p3.asDiagonal();
  op.L1 = model.linear_operator().dense();
  op.L1.diagonal().array() += w.array() - state.mu;
  op.L1 += op.L2;
  return op;
}

double quartet_defect(const std::vector<std::complex<double>>& ev) {
  auto dist = [&ev](std::complex<double> z) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : ev) best = std::min(best, std::abs(e - z));
    return best;
  };
  double worst = 0.0;
  for (const auto& l : ev) {
    worst = std::max({worst, dist(-l), dist(std::conj(l)), dist(-std::conj(l))});
  }
  return worst;
}

namespace {

std::vector<Eigen::MatrixXd> parity_split(const Eigen::MatrixXd& a, SymmetryClass symmetry) {
  if (symmetry == SymmetryClass::asymmetric) return {a};
  return {parity_block(a, Parity::even), parity_block(a, Parity::odd)};
}

// block operator split: the even/odd sectors of [[L1, L2], [-L2, -L1]]
Eigen::MatrixXd block_of(const Eigen::MatrixXd& l1, const Eigen::MatrixXd& l2) {
  const Eigen::Index m = l1.rows();
  Eigen::MatrixXd b(2 * m, 2 * m);
  b.topLeftCorner(m, m) = l1;
  b.topRightCorner(m, m) = l2;
  b.bottomLeftCorner(m, m) = -l2;
  b.bottomRightCorner(m, m) = -l1;
  return b;
}

// Householder deflation of a known eigenvector v with eigenvalue zero: the
// trailing block of H A H carries the remaining spectrum.
Eigen::MatrixXd deflate(const Eigen::MatrixXd& a, const RealVector& v) {
  const Eigen::Index k = a.rows();
  RealVector w = v / v.norm();
  w[0] += w[0] >= 0.0 ? 1.0 : -1.0;
  w /= w.norm();
  // H = I - 2 w w^T
  Eigen::MatrixXd ha = a - 2.0 * w * (w.transpose() * a);
  Eigen::MatrixXd hah = ha - 2.0 * (ha * w) * w.transpose();
  return hah.bottomRightCorner(k - 1, k - 1);
}

}  // namespace

BdgSpectrum solve_bdg(const BdgOperator& op, const BdgOptions& options) {
  BdgSpectrum out;
  std::vector<std::complex<double>>& ev = out.eigenvalues;
  const std::complex<double> minus_i(0.0, -1.0);

  if (options.method == BdgMethod::reduced) {
    const Eigen::MatrixXd b = op.L1 + op.L2;
    const Eigen::MatrixXd p = (op.L1 - op.L2) * b;
    // P has the exact kernel vector B^{-1} psi0 from phase invariance; it is
    // deflated so rounding in P (of order eps |L|^2) does not leak into
    // lambda as a spurious O(1e-6) pair.
    const RealVector kernel = b.partialPivLu().solve(op.psi);
    const auto blocks = parity_split(p, op.symmetry);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const Eigen::MatrixXd& blk = blocks[k];
      RealVector v;
      if (op.symmetry == SymmetryClass::asymmetric) {
        v = kernel;
      } else {
        const Parity own =
            op.symmetry == SymmetryClass::symmetric ? Parity::even : Parity::odd;
        const Parity sector = k == 0 ? Parity::even : Parity::odd;
        if (sector == own) v = parity_basis(static_cast<int>(kernel.size()), own).transpose() * kernel;
      }
      Eigen::MatrixXd work = blk;
      if (v.size() > 0) {
        work = deflate(blk, v);
        ev.push_back(0.0);
        ev.push_back(0.0);
      }
      Eigen::EigenSolver<Eigen::MatrixXd> es(work, false);
      if (es.info() != Eigen::Success) throw BdgFailure("solve_bdg: eigensolver failed");
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const std::complex<double> l = std::sqrt(-es.eigenvalues()[i]);
        ev.push_back(l);
        ev.push_back(-l);
      }
    }
  } else {
    std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> parts;
    if (op.symmetry == SymmetryClass::asymmetric) {
      parts.emplace_back(op.L1, op.L2);
    } else {
      for (Parity par : {Parity::even, Parity::odd}) {
        parts.emplace_back(parity_block(op.L1, par), parity_block(op.L2, par));
      }
    }
    for (const auto& [l1, l2] : parts) {
      Eigen::EigenSolver<Eigen::MatrixXd> es(block_of(l1, l2), false);
      if (es.info() != Eigen::Success) throw BdgFailure("solve_bdg: eigensolver failed");
      // eigenvalues of the block are i lambda
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        ev.push_back(minus_i * es.eigenvalues()[i]);
      }
    }
  }

  out.min_abs = std::numeric_limits<double>::infinity();
  out.max_real_part = -std::numeric_limits<double>::infinity();
  for (const auto& l : ev) {
    out.max_real_part = std::max(out.max_real_part, l.real());
    out.min_abs = std::min(out.min_abs, std::abs(l));
    if (l.real() > options.threshold) ++out.unstable_count;
  }
  if (options.method == BdgMethod::block) out.quartet_defect = quartet_defect(ev);
  return out;
}

std::optional<UnstableMode> unstable_mode(const BdgOperator& op, double threshold) {
  const Eigen::MatrixXd b = op.L1 + op.L2;
  const Eigen::MatrixXd p = (op.L1 - op.L2) * b;
  Eigen::EigenSolver<Eigen::MatrixXd> es(p, true);
  if (es.info() != Eigen::Success) throw BdgFailure("unstable_mode: eigensolver failed");
  int idx = -1;
  double best = -threshold * threshold;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto e = es.eigenvalues()[i];
    // real lambda^2 > 0  <=>  real eigenvalue of P below zero
    if (std::abs(e.imag()) <= 1e-10 * std::max(1.0, std::abs(e.real())) && e.real() < best) {
      best = e.real();
      idx = static_cast<int>(i);
    }
  }
  if (idx < 0) return std::nullopt;
  const double lambda = std::sqrt(-best);
  RealVector u = es.eigenvectors().col(idx).real();
  const RealVector bu = b * u;
  ComplexVector inner_part(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) inner_part[i] = {u[i], -bu[i] / lambda};

  UnstableMode mode;
  mode.growth_rate = lambda;
  mode.perturbation = ComplexVector::Zero(u.size() + 2);
  mode.perturbation.segment(1, u.size()) = inner_part;
  mode.perturbation /= std::sqrt(mode.perturbation.squaredNorm());
  return mode;
}

LambdaComparison two_mode_lambda_check(const BdgSpectrum& spectrum, double lambda_sq,
                                       double threshold) {
  LambdaComparison c;
  c.pde_rate = std::max(spectrum.max_real_part, 0.0);
  c.two_mode_rate = lambda_sq > 0.0 ? std::sqrt(lambda_sq) : 0.0;
  const bool pde_unstable = spectrum.max_real_part > threshold;
  const bool tm_unstable = c.two_mode_rate > threshold;
  c.classification_agrees = pde_unstable == tm_unstable;
  const double scale = std::max(c.pde_rate, c.two_mode_rate);
  c.relative_difference = scale > 0.0 ? std::abs(c.pde_rate - c.two_mode_rate) / scale : 0.0;
  return c;
}

}  // namespace cqdw
