#include "cqdw/dynamics.hpp"

#include <cmath>
#include <random>

namespace cqdw {

namespace {

using cd = std::complex<double>;

// (1 + i a H) x = rhs for H tridiagonal with diagonal `diag` and constant
// off-diagonal `off`; interior samples only.
void cayley_solve(const RealVector& diag, double off, double a, const ComplexVector& rhs,
                  ComplexVector& x, std::vector<cd>& scratch) {
  const Eigen::Index m = diag.size();
  scratch.resize(m);
  const cd ia(0.0, a);
  const cd e = ia * off;
  cd denom = 1.0 + ia * diag[0];
  scratch[0] = e / denom;
  x[0] = rhs[0] / denom;
  for (Eigen::Index k = 1; k < m; ++k) {
    denom = 1.0 + ia * diag[k] - e * scratch[k - 1];
    scratch[k] = e / denom;
    x[k] = (rhs[k] - e * x[k - 1]) / denom;
  }
  for (Eigen::Index k = m - 2; k >= 0; --k) x[k] -= scratch[k] * x[k + 1];
}

double breaking_norm(const ComplexVector& psi, Parity parity) {
  const ComplexVector r = reflect(psi);
  const ComplexVector part = parity == Parity::even ? ComplexVector(0.5 * (psi - r))
                                                    : ComplexVector(0.5 * (psi + r));
  return part.norm();
}

}  // namespace

EvolutionRun evolve(const NlsModel& model, const ComplexVector& initial, double mu, double t_end,
                    const EvolutionOptions& opt, std::optional<Parity> parity) {
  const Grid& g = model.grid();
  if (initial.size() != g.n_points) throw InvalidArgument("evolve: grid mismatch");
  if (!(opt.dt > 0.0) || !(t_end >= 0.0)) throw InvalidArgument("evolve: need dt > 0, t_end >= 0");
  const double sample_steps_f = opt.sample_interval / opt.dt;
  const long sample_every = std::max<long>(1, std::lround(sample_steps_f));
  const long steps = std::lround(t_end / opt.dt);

  const TridiagonalOperator& op = model.linear_operator();
  const int m = op.size();
  const double off = m > 1 ? op.off_diagonal[0] : 0.0;
  const double a = 0.5 * opt.dt;

  ComplexVector psi = initial;
  psi[0] = 0.0;
  psi[g.n_points - 1] = 0.0;
  const double n0 = norm_squared(g, psi);
  if (!(n0 > 0.0)) throw InvalidArgument("evolve: zero initial state");

  EvolutionRun run;
  auto record = [&](double t) {
    const double n = norm_squared(g, psi);
    run.times.push_back(t);
    run.norm_series.push_back(n);
    run.imbalance_series.push_back(density_imbalance(g, psi.cwiseAbs2()));
    run.breaking_series.push_back(parity ? breaking_norm(psi, *parity) / std::sqrt(psi.squaredNorm())
                                         : 0.0);
    if (opt.keep_snapshots) run.snapshots.push_back(psi);
    run.max_norm_drift = std::max(run.max_norm_drift, std::abs(n - n0) / n0);
  };
  record(0.0);

  ComplexVector cur = psi.segment(1, m);
  ComplexVector next = cur;
  ComplexVector rhs(m);
  ComplexVector full = ComplexVector::Zero(g.n_points);
  RealVector diag(m);
  std::vector<cd> scratch;
  const RealVector base_diag = op.diagonal.array() - mu;

  for (long step = 1; step <= steps; ++step) {
    // explicit part (1 - i a H_mid) cur, with H_mid updated each stage
    ComplexVector guess = cur;
    bool converged = false;
    for (int it = 0; it < opt.max_stage_iterations; ++it) {
      full.segment(1, m) = 0.5 * (cur + guess);
      const RealVector w = model.nonlinear_potential(full.cwiseAbs2());
      diag = base_diag + w.segment(1, m);
      for (int k = 0; k < m; ++k) {
        cd hx = diag[k] * cur[k];
        if (k > 0) hx += off * cur[k - 1];
        if (k + 1 < m) hx += off * cur[k + 1];
        rhs[k] = cur[k] - cd(0.0, a) * hx;
      }
      cayley_solve(diag, off, a, rhs, next, scratch);
      const double change = (next - guess).cwiseAbs().maxCoeff();
      guess = next;
      if (change <= opt.stage_tolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw DynamicsFailure("evolve: implicit stage did not converge at t = " +
                            std::to_string(step * opt.dt));
    }
    cur = next;
    if (!cur.allFinite()) throw DynamicsFailure("evolve: non-finite field");
    if (step % sample_every == 0 || step == steps) {
      psi.segment(1, m) = cur;
      record(step * opt.dt);
      if (run.max_norm_drift > opt.norm_tolerance) {
        throw DynamicsFailure("evolve: norm drift above tolerance");
      }
    }
  }
  return run;
}

ComplexVector random_perturbation(const Grid& grid, const RealVector& psi, double eps,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector xi = ComplexVector::Zero(grid.n_points);
  for (int i = 1; i + 1 < grid.n_points; ++i) xi[i] = {normal(rng), normal(rng)};
  return directed_perturbation(grid, psi, xi, eps);
}

ComplexVector directed_perturbation(const Grid& grid, const RealVector& psi,
                                    const ComplexVector& direction, double eps) {
  if (direction.size() != grid.n_points) throw InvalidArgument("perturbation: grid mismatch");
  const double np = std::sqrt(norm_squared(grid, psi));
  const double nd = std::sqrt(norm_squared(grid, direction));
  if (!(nd > 0.0)) throw InvalidArgument("perturbation: zero direction");
  ComplexVector out = psi.cast<cd>() + (eps * np / nd) * direction;
  out[0] = 0.0;
  out[grid.n_points - 1] = 0.0;
  return out;
}

PhaseSample project_state(const Grid& grid, const RealVector& phi_left,
                          const RealVector& phi_right, const ComplexVector& psi, double t) {
  const cd cl = inner(grid, phi_left, psi);
  const cd cr = inner(grid, phi_right, psi);
  const double nl = std::norm(cl);
  const double nr = std::norm(cr);
  const double n_proj = nl + nr;
  const double n = norm_squared(grid, psi);
  PhaseSample s;
  s.t = t;
  s.z = n_proj > 0.0 ? (nl - nr) / n_proj : 0.0;
  s.outside_fraction = n > 0.0 ? 1.0 - n_proj / n : 0.0;
  s.theta_defined = std::abs(cl) >= 1e-12 && std::abs(cr) >= 1e-12;
  s.theta = s.theta_defined ? std::arg(cl * std::conj(cr)) : 0.0;
  return s;
}

std::vector<PhaseSample> project_phase_plane(const EvolutionRun& run, const Grid& grid,
                                             const RealVector& phi_left,
                                             const RealVector& phi_right) {
  if (run.snapshots.size() != run.times.size()) {
    throw InvalidArgument("project_phase_plane: run has no snapshots");
  }
  std::vector<PhaseSample> out;
  out.reserve(run.times.size());
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    out.push_back(project_state(grid, phi_left, phi_right, run.snapshots[k], run.times[k]));
  }
  return out;
}

std::optional<double> asymmetry_onset(const EvolutionRun& run, double level) {
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    if (std::abs(run.imbalance_series[k]) >= level) return run.times[k];
  }
  return std::nullopt;
}

GrowthFit fit_growth(const EvolutionRun& run, double lower, double upper) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  GrowthFit fit;
  bool started = false;
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const double v = run.breaking_series[k];
    if (v > upper && started) break;
    if (v < lower || v > upper) continue;
    if (!started) fit.t_begin = run.times[k];
    started = true;
    const double t = run.times[k];
    const double y = std::log(v);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++fit.samples;
    fit.t_end = t;
  }
  if (fit.samples < 2) return fit;
  const double n = fit.samples;
  fit.rate = (n * sty - st * sy) / (n * stt - st * st);
  return fit;
}

RealVector solve_tridiagonal(const RealVector& sub, const RealVector& diag, const RealVector& sup,
                             const RealVector& rhs) {
  const Eigen::Index n = diag.size();
  if (rhs.size() != n || sub.size() != n - 1 || sup.size() != n - 1) {
    throw InvalidArgument("solve_tridiagonal: size mismatch");
  }
  RealVector c(n), x(n);
  double denom = diag[0];
  c[0] = n > 1 ? sup[0] / denom : 0.0;
  x[0] = rhs[0] / denom;
  for (Eigen::Index k = 1; k < n; ++k) {
    denom = diag[k] - sub[k - 1] * c[k - 1];
    if (k + 1 < n) c[k] = sup[k] / denom;
    x[k] = (rhs[k] - sub[k - 1] * x[k - 1]) / denom;
  }
  for (Eigen::Index k = n - 2; k >= 0; --k) x[k] -= c[k] * x[k + 1];
  return x;
}

RealVector solve_screened_poisson(const Grid& grid, const RealVector& source, double d) {
  if (!(d > 0.0)) throw InvalidArgument("solve_screened_poisson: d must be positive");
  if (source.size() != grid.n_points) throw InvalidArgument("solve_screened_poisson: grid mismatch");
  const int n = grid.n_points;
  const double r = std::exp(-grid.spacing / std::sqrt(d));
  const double c = r / ((1.0 - r) * (1.0 - r));
  RealVector diag = RealVector::Constant(n, 1.0 + 2.0 * c);
  // free-space closure folds the ghost value r m_0 into the end rows
  diag[0] -= c * r;
  diag[n - 1] -= c * r;
  const RealVector off = RealVector::Constant(n - 1, -c);
  // trapezoid end factors, matching the quadrature of the convolution
  RealVector s = source;
  s[0] *= 0.5;
  s[n - 1] *= 0.5;
  return solve_tridiagonal(off, diag, off, s);
}

RealVector saturable_source(const ComplexVector& u, double sigma0) {
  const RealVector a2 = u.cwiseAbs2();
  return sigma0 * (a2 - a2.cwiseProduct(a2));
}

}  // namespace cqdw
