#include "cqdw/continuation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <functional>
#include <limits>

namespace cqdw {

std::string to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::symmetric: return "symmetric";
    case SymmetryClass::antisymmetric: return "antisymmetric";
    case SymmetryClass::asymmetric: return "asymmetric";
  }
  return "unknown";
}

std::string to_string(EventType t) {
  switch (t) {
    case EventType::pitchfork: return "pitchfork";
    case EventType::fold: return "fold";
    case EventType::merge: return "merge";
  }
  return "unknown";
}

namespace {

// relative distance to the nearest parity class
double parity_defect(const RealVector& psi) {
  const double n = psi.norm();
  if (n == 0.0) return 0.0;
  const RealVector r = reflect(psi);
  return std::min((psi - r).norm(), (psi + r).norm()) / n;
}

double max_abs(const RealVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

SymmetryClass classify_symmetry(const RealVector& psi) {
  const double n = psi.norm();
  if (n == 0.0) return SymmetryClass::symmetric;
  const RealVector r = reflect(psi);
  if ((psi - r).norm() / n <= 1e-6) return SymmetryClass::symmetric;
  if ((psi + r).norm() / n <= 1e-6) return SymmetryClass::antisymmetric;
  return SymmetryClass::asymmetric;
}

RealVector stationary_residual(const NlsModel& model, const RealVector& psi, double mu) {
  return model.residual(psi, mu);
}

StationaryState make_state(const NlsModel& model, RealVector psi, double mu, int iterations) {
  StationaryState st;
  st.residual = max_abs(model.residual(psi, mu));
  st.norm = model.norm(psi);
  st.symmetry = classify_symmetry(psi);
  st.mu = mu;
  st.iterations = iterations;
  const Eigen::Index n = psi.size();
  st.edge_amplitude = n > 2 ? std::max(std::abs(psi[1]), std::abs(psi[n - 2])) : 0.0;
  st.psi = std::move(psi);
  return st;
}

double Branch::max_edge_amplitude() const {
  double m = 0.0;
  for (const auto& s : states) m = std::max(m, s.edge_amplitude);
  return m;
}

StationaryState newton_solve(const NlsModel& model, const RealVector& guess, double mu,
                             const NewtonOptions& options) {
  if (guess.size() != model.grid().n_points) throw InvalidArgument("newton_solve: grid mismatch");
  RealVector psi = guess;
  psi[0] = 0.0;
  psi[psi.size() - 1] = 0.0;
  std::vector<double> history;
  for (int it = 0; it <= options.max_iterations; ++it) {
    const RealVector f = model.residual(psi, mu);
    const double res = max_abs(f);
    history.push_back(res);
    if (!std::isfinite(res)) throw NewtonFailure("newton_solve: residual not finite", history, false);
    if (res <= options.tolerance) {
      if (!options.allow_trivial && model.norm(psi) < 1e-8) {
        throw NewtonFailure("newton_solve: converged to the trivial solution", history, true);
      }
      // one extra step down to rounding level: the BdG phase mode is only
      // as close to zero as sqrt(residual)
      RealVector polished = psi;
      polished.segment(1, psi.size() - 2) -= model.jacobian(psi, mu).partialPivLu().solve(interior(f));
      if (max_abs(model.residual(polished, mu)) < res) psi = std::move(polished);
      return make_state(model, std::move(psi), mu, it);
    }
    if (it == options.max_iterations) break;
    const Eigen::MatrixXd j = model.jacobian(psi, mu);
    const RealVector step = j.partialPivLu().solve(interior(f));
    psi.segment(1, step.size()) -= step;
  }
  throw NewtonFailure("newton_solve: no convergence within max_iterations", history,
                      model.norm(psi) < 1e-8);
}

StationaryState seed_from_linear_mode(const NlsModel& model, const RealVector& mode,
                                      double omega_k, double target_norm,
                                      const NewtonOptions& options) {
  if (!(target_norm > 0.0)) throw InvalidArgument("seed_from_linear_mode: target_norm > 0");
  const Grid& g = model.grid();
  const RealVector u = mode / std::sqrt(norm_squared(g, mode));
  const RealVector u2 = u.cwiseProduct(u);
  const double c3 = inner(g, u2, model.cubic().apply(u2));
  const double c5 = inner(g, u2, model.quintic().apply(u2.cwiseProduct(u2)));
  const double a2 = target_norm;
  const double mu =
      omega_k + model.params().s * a2 * c3 + model.params().delta * a2 * a2 * c5;
  StationaryState st = newton_solve(model, std::sqrt(a2) * u, mu, options);
  const SymmetryClass mode_class = classify_symmetry(u);
  if (mode_class != SymmetryClass::asymmetric) {
    const Parity par = mode_class == SymmetryClass::symmetric ? Parity::even : Parity::odd;
    st = make_state(model, parity_project(st.psi, par), mu, st.iterations);
  }
  return st;
}

namespace {

// Pseudo-arclength machinery on the interior samples, optionally confined to
// one parity subspace with orthonormal basis Q.
class Tracer {
 public:
  Tracer(const NlsModel& model, SymmetryClass family, const NewtonOptions& newton)
      : model_(model), h_(model.grid().spacing), m_(model.interior_size()), newton_(newton) {
    if (family != SymmetryClass::asymmetric) {
      parity_ = true;
      const Parity own = family == SymmetryClass::symmetric ? Parity::even : Parity::odd;
      const Parity other = own == Parity::even ? Parity::odd : Parity::even;
      own_ = own;
      other_ = other;
      q_ = parity_basis(m_, own);
      qb_ = parity_basis(m_, other);
    }
  }

  struct Point {
    RealVector psi;  // interior
    double mu = 0.0;
    RealVector t_psi;
    double t_mu = 0.0;
    int iterations = 0;
  };

  bool parity() const { return parity_; }

  RealVector to_reduced(const RealVector& v) const {
    return parity_ ? RealVector(q_.transpose() * v) : v;
  }
  RealVector from_reduced(const RealVector& c) const { return parity_ ? RealVector(q_ * c) : c; }

  Eigen::MatrixXd reduced_jacobian(const RealVector& psi, double mu) const {
    const Eigen::MatrixXd j = model_.jacobian(embed(psi), mu);
    if (!parity_) return j;
    return parity_block(j, own_);
  }

  Eigen::MatrixXd augmented(const RealVector& psi, double mu, const RealVector& t_psi,
                            double t_mu) const {
    const Eigen::MatrixXd jr = reduced_jacobian(psi, mu);
    const int k = static_cast<int>(jr.rows());
    Eigen::MatrixXd a(k + 1, k + 1);
    a.topLeftCorner(k, k) = jr;
    a.topRightCorner(k, 1) = -to_reduced(psi);
    a.bottomLeftCorner(1, k) = h_ * to_reduced(t_psi).transpose();
    a(k, k) = t_mu;
    return a;
  }

  RealVector residual(const RealVector& psi, double mu) const {
    return interior(model_.residual(embed(psi), mu));
  }

  /// Corrector from predictor psi0 + ds t. Returns false on failure.
  bool correct(const Point& from, double ds, Point& out) const {
    RealVector psi = from.psi + ds * from.t_psi;
    double mu = from.mu + ds * from.t_mu;
    for (int it = 0; it <= newton_.max_iterations; ++it) {
      const RealVector f = residual(psi, mu);
      const double c = h_ * from.t_psi.dot(psi - from.psi) + from.t_mu * (mu - from.mu) - ds;
      const double res = max_abs(f);
      if (!std::isfinite(res)) return false;
      const bool converged = res <= newton_.tolerance && std::abs(c) <= 1e-10;
      if (!converged && (it == newton_.max_iterations || res > 1e3)) return false;
      const Eigen::MatrixXd a = augmented(psi, mu, from.t_psi, from.t_mu);
      RealVector rhs(a.rows());
      rhs.head(a.rows() - 1) = to_reduced(f);
      rhs[a.rows() - 1] = c;
      const RealVector d = a.partialPivLu().solve(rhs);
      RealVector next = psi - from_reduced(d.head(d.size() - 1));
      const double next_mu = mu - d[d.size() - 1];
      if (converged) {
        // polish as in newton_solve
        if (max_abs(residual(next, next_mu)) < res) {
          psi = std::move(next);
          mu = next_mu;
        }
        out.psi = psi;
        out.mu = mu;
        out.iterations = it;
        tangent(out, from);
        return true;
      }
      psi = std::move(next);
      mu = next_mu;
    }
    return false;
  }

  /// Tangent at p, oriented along the reference direction.
  void tangent(Point& p, const Point& ref) const {
    const Eigen::MatrixXd a = augmented(p.psi, p.mu, ref.t_psi, ref.t_mu);
    RealVector rhs = RealVector::Zero(a.rows());
    rhs[a.rows() - 1] = 1.0;
    const RealVector d = a.partialPivLu().solve(rhs);
    RealVector t_psi = from_reduced(d.head(d.size() - 1));
    double t_mu = d[d.size() - 1];
    const double n = std::sqrt(h_ * t_psi.squaredNorm() + t_mu * t_mu);
    p.t_psi = t_psi / n;
    p.t_mu = t_mu / n;
  }

  /// Tangent at a seed from J psi' = psi.
  void initial_tangent(Point& p) const {
    const Eigen::MatrixXd jr = reduced_jacobian(p.psi, p.mu);
    const RealVector dpsi = from_reduced(jr.partialPivLu().solve(to_reduced(p.psi)));
    const double n = std::sqrt(h_ * dpsi.squaredNorm() + 1.0);
    p.t_psi = dpsi / n;
    p.t_mu = 1.0 / n;
  }

  /// Sign of det J restricted to the breaking parity; flips when a real
  /// eigenvalue crosses zero.
  int breaking_sign(const Point& p) const {
    const Eigen::MatrixXd jb = parity_block(model_.jacobian(embed(p.psi), p.mu), other_);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jb);
    double sign = lu.permutationP().determinant();
    const auto d = lu.matrixLU().diagonal();
    for (int i = 0; i < d.size(); ++i) sign *= d[i] < 0.0 ? -1.0 : 1.0;
    return sign < 0.0 ? -1 : 1;
  }

  BreakingMode breaking_mode(const RealVector& psi, double mu) const {
    const Eigen::MatrixXd jb = parity_block(model_.jacobian(embed(psi), mu), other_);
    const Eigen::MatrixXd& qb = qb_;
    Eigen::EigenSolver<Eigen::MatrixXd> es(jb, true);
    BreakingMode out;
    int idx = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double re = es.eigenvalues()[i].real();
      if (re < 0.0) ++out.negative_count;
      if (std::abs(re) < std::abs(best)) {
        best = re;
        idx = i;
      }
    }
    out.eigenvalue = best;
    RealVector v = embed(qb * es.eigenvectors().col(idx).real());
    v /= std::sqrt(norm_squared(model_.grid(), v));
    // deterministic orientation: positive overlap with x on the left half
    double orient = 0.0;
    for (int i = 0; i < v.size() / 2; ++i) orient += v[i];
    if (orient < 0.0) v = -v;
    out.vector = std::move(v);
    return out;
  }

  /// Bisects on ds in (0, ds_hi) from `from` until `same_side(probe)` flips
  /// and mu brackets are within tol. Returns the probe on the far side.
  Point bisect(const Point& from, double ds_hi, const Point& hi_point,
               const std::function<bool(const Point&)>& same_side, double tol) const {
    double lo = 0.0, hi = ds_hi;
    Point p_lo = from;
    Point p_hi = hi_point;
    for (int it = 0; it < 60; ++it) {
      if (std::abs(p_hi.mu - p_lo.mu) <= tol && hi - lo < 1e-4) break;
      const double mid = 0.5 * (lo + hi);
      Point probe;
      if (!correct(from, mid, probe)) break;
      if (same_side(probe)) {
        lo = mid;
        p_lo = probe;
      } else {
        hi = mid;
        p_hi = probe;
      }
    }
    // report the point nearest the transition in mu
    Point mid_point = p_hi;
    mid_point.mu = 0.5 * (p_lo.mu + p_hi.mu);
    mid_point.psi = 0.5 * (p_lo.psi + p_hi.psi);
    return mid_point;
  }

  double h() const { return h_; }

 private:
  const NlsModel& model_;
  double h_;
  int m_;
  NewtonOptions newton_;
  bool parity_ = false;
  Parity own_ = Parity::even;
  Parity other_ = Parity::odd;
  Eigen::MatrixXd q_, qb_;
};

double imbalance(const Grid& g, const RealVector& psi) {
  return density_imbalance(g, psi.cwiseProduct(psi));
}

}  // namespace

BreakingMode breaking_mode(const NlsModel& model, const StationaryState& state) {
  if (state.symmetry == SymmetryClass::asymmetric) {
    throw InvalidArgument("breaking_mode: state has no parity");
  }
  const Tracer tr(model, state.symmetry, {});
  return tr.breaking_mode(interior(state.psi), state.mu);
}

Branch continue_branch(const NlsModel& model, const StationaryState& seed,
                       const ContinuationOptions& opt, const std::optional<RealVector>& direction) {
  if (!(opt.ds_min > 0.0 && opt.ds_min <= opt.ds_max)) {
    throw InvalidArgument("continue_branch: need 0 < ds_min <= ds_max");
  }
  if (!(opt.mu_min < opt.mu_max)) throw InvalidArgument("continue_branch: empty mu range");
  if (!(seed.residual <= 1e-8)) throw InvalidArgument("continue_branch: seed not converged");

  const Grid& g = model.grid();
  Branch branch;
  branch.family = seed.symmetry;
  const Tracer tr(model, seed.symmetry, opt.newton);

  RealVector seed_psi = seed.psi;
  if (seed.symmetry != SymmetryClass::asymmetric) {
    seed_psi = parity_project(seed_psi, seed.symmetry == SymmetryClass::symmetric ? Parity::even
                                                                                  : Parity::odd);
  }
  Tracer::Point cur;
  cur.psi = interior(seed_psi);
  cur.mu = seed.mu;
  if (direction) {
    RealVector d = interior(*direction);
    double dmu = 0.0;
    if (direction->size() == g.n_points + 1) {
      d = direction->segment(1, g.n_points - 2);
      dmu = (*direction)[g.n_points];
    }
    const double n = std::sqrt(tr.h() * d.squaredNorm() + dmu * dmu);
    cur.t_psi = d / n;
    cur.t_mu = dmu / n;
    const Tracer::Point ref = cur;
    tr.tangent(cur, ref);
  } else {
    tr.initial_tangent(cur);
    bool flip = false;
    if (opt.initial_direction != 0) {
      flip = cur.t_mu * opt.initial_direction < 0.0;
    } else {
      flip = cur.psi.dot(cur.t_psi) < 0.0;  // increasing N
    }
    if (flip) {
      cur.t_psi = -cur.t_psi;
      cur.t_mu = -cur.t_mu;
    }
  }
  branch.states.push_back(make_state(model, embed(cur.psi), cur.mu));

  const bool scan = tr.parity() && opt.detect_pitchforks;
  int brk_cur = scan ? tr.breaking_sign(cur) : 0;
  double z_cur = imbalance(g, embed(cur.psi));
  double defect_peak = parity_defect(embed(cur.psi));

  double ds = opt.ds_initial;
  branch.termination = "max_steps";
  for (int step = 0; step < opt.max_steps; ++step) {
    Tracer::Point next;
    bool ok = false;
    while (!ok) {
      ok = tr.correct(cur, ds, next);
      if (!ok) {
        if (ds <= opt.ds_min * (1.0 + 1e-12)) break;
        ds = std::max(0.5 * ds, opt.ds_min);
      }
    }
    if (!ok) {
      branch.termination = "newton_failure";
      break;
    }
    const int index = static_cast<int>(branch.states.size());
    const RealVector psi_full = embed(next.psi);
    const double n_next = model.norm(psi_full);

    // fold: sign change of the mu component of the tangent
    if (next.t_mu * cur.t_mu < 0.0) {
      const double sgn_from = cur.t_mu;
      const auto p = tr.bisect(cur, ds, next,
                               [sgn_from](const Tracer::Point& q) { return q.t_mu * sgn_from > 0.0; },
                               opt.refine_tolerance);
      BranchEvent ev;
      ev.type = EventType::fold;
      ev.mu = p.mu;
      ev.psi = embed(p.psi);
      ev.N = model.norm(ev.psi);
      ev.index = index;
      branch.events.push_back(std::move(ev));
    }

    if (scan) {
      const int brk_next = tr.breaking_sign(next);
      if (brk_next != brk_cur) {
        const int sign_from = brk_cur;
        const auto p = tr.bisect(
            cur, ds, next,
            [&tr, sign_from](const Tracer::Point& q) { return tr.breaking_sign(q) == sign_from; },
            opt.refine_tolerance);
        BranchEvent ev;
        ev.type = EventType::pitchfork;
        ev.mu = p.mu;
        ev.psi = embed(p.psi);
        ev.N = model.norm(ev.psi);
        ev.index = index;
        ev.critical_vector = tr.breaking_mode(p.psi, p.mu).vector;
        branch.events.push_back(std::move(ev));
      }
      brk_cur = brk_next;
    }

    bool merged = false;
    if (!tr.parity()) {
      const double z_next = imbalance(g, psi_full);
      const double defect = parity_defect(psi_full);
      defect_peak = std::max(defect_peak, defect);
      const bool crossed = z_next * z_cur < 0.0;
      const bool absorbed = defect_peak > 1e-2 && defect < 1e-4;
      if (crossed || absorbed) {
        BranchEvent ev;
        ev.type = EventType::merge;
        if (crossed) {
          const double z_from = z_cur;
          const auto p = tr.bisect(
              cur, ds, next,
              [&g, z_from](const Tracer::Point& q) { return imbalance(g, embed(q.psi)) * z_from > 0.0; },
              opt.refine_tolerance);
          ev.mu = p.mu;
          ev.psi = embed(p.psi);
        } else {
          ev.mu = next.mu;
          ev.psi = psi_full;
        }
        ev.N = model.norm(ev.psi);
        ev.index = index;
        branch.events.push_back(std::move(ev));
        merged = true;
        // stepping through the merge onto the mirror branch turns mu around;
        // that is the pitchfork itself, not a fold
        std::erase_if(branch.events, [index](const BranchEvent& e) {
          return e.type == EventType::fold && e.index == index;
        });
      }
      z_cur = z_next;
    }

    branch.states.push_back(make_state(model, psi_full, next.mu, next.iterations));
    cur = std::move(next);

    if (merged && opt.stop_at_merge) {
      branch.termination = "merge";
      break;
    }
    if (cur.mu < opt.mu_min || cur.mu > opt.mu_max) {
      branch.termination = "mu_range";
      break;
    }
    if (n_next > opt.norm_max) {
      branch.termination = "norm_cap";
      break;
    }
    if (n_next < 1e-8) {
      branch.termination = "trivial";
      break;
    }
    if (cur.iterations <= 3) ds = std::min(1.5 * ds, opt.ds_max);
  }
  return branch;
}

std::vector<BranchEvent> detect_pitchfork(const Branch& branch) {
  if (branch.states.size() < 3) throw InvalidArgument("detect_pitchfork: need at least 3 states");
  std::vector<BranchEvent> out;
  for (const auto& e : branch.events) {
    if (e.type == EventType::pitchfork) out.push_back(e);
  }
  return out;
}

StationaryState switch_branch(const NlsModel& model, const BranchEvent& pf,
                              const NewtonOptions& options) {
  if (pf.type != EventType::pitchfork || pf.critical_vector.size() == 0) {
    throw InvalidArgument("switch_branch: need a pitchfork event with its critical vector");
  }
  const Grid& g = model.grid();
  const double h = g.spacing;
  const RealVector base = interior(pf.psi);
  const RealVector v = interior(pf.critical_vector);
  double kick = 1e-3 * std::sqrt(model.norm(pf.psi));
  std::vector<double> history;
  for (int attempt = 0; attempt < 10; ++attempt, kick *= 2.0) {
    RealVector psi = base + kick * v;
    double mu = pf.mu;
    bool converged = false;
    for (int it = 0; it <= options.max_iterations; ++it) {
      const RealVector f = interior(model.residual(embed(psi), mu));
      const double c = h * v.dot(psi - base) - kick;
      const double res = max_abs(f);
      history.push_back(res);
      if (!std::isfinite(res)) break;
      if (res <= options.tolerance && std::abs(c) <= 1e-12) {
        converged = true;
        break;
      }
      const int m = static_cast<int>(psi.size());
      Eigen::MatrixXd a(m + 1, m + 1);
      a.topLeftCorner(m, m) = model.jacobian(embed(psi), mu);
      a.topRightCorner(m, 1) = -psi;
      a.bottomLeftCorner(1, m) = h * v.transpose();
      a(m, m) = 0.0;
      RealVector rhs(m + 1);
      rhs.head(m) = f;
      rhs[m] = c;
      const RealVector d = a.partialPivLu().solve(rhs);
      psi -= d.head(m);
      mu -= d[m];
    }
    if (!converged) continue;
    // already converged; newton_solve only polishes at fixed mu
    StationaryState st = newton_solve(model, embed(psi), mu, options);
    if (st.symmetry == SymmetryClass::asymmetric) return st;
  }
  throw NewtonFailure("switch_branch: no asymmetric daughter state found", history, false);
}

StationaryState state_at_mu(const NlsModel& model, const Branch& branch, double mu,
                            const NewtonOptions& options) {
  const auto& st = branch.states;
  for (std::size_t k = 1; k < st.size(); ++k) {
    const double a = st[k - 1].mu;
    const double b = st[k].mu;
    if ((a - mu) * (b - mu) > 0.0) continue;
    const double w = a == b ? 0.0 : (mu - a) / (b - a);
    const RealVector guess = (1.0 - w) * st[k - 1].psi + w * st[k].psi;
    StationaryState out = newton_solve(model, guess, mu, options);
    if (branch.family != SymmetryClass::asymmetric) {
      const Parity par =
          branch.family == SymmetryClass::symmetric ? Parity::even : Parity::odd;
      out = make_state(model, parity_project(out.psi, par), mu, out.iterations);
    }
    return out;
  }
  throw InvalidArgument("state_at_mu: mu not covered by the branch");
}

void set_partner_overlaps(const NlsModel& model, Branch& branch, const RealVector& partner) {
  const Grid& g = model.grid();
  const RealVector u = partner / std::sqrt(norm_squared(g, partner));
  for (auto& e : branch.events) {
    if (e.type != EventType::pitchfork || e.critical_vector.size() == 0) continue;
    e.partner_overlap = std::abs(inner(g, u, e.critical_vector));
  }
}

}  // namespace cqdw
