#include "cqdw/two_mode.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cqdw {

namespace {

constexpr double kPi = std::numbers::pi;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// real roots of a x^2 + b x + c, ascending; linear fallback when a == 0
std::vector<double> quadratic_roots(double a, double b, double c, int& discarded) {
  if (a == 0.0) {
    if (b == 0.0) return {};
    return {-c / b};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    discarded += 2;
    return {};
  }
  const double sq = std::sqrt(disc);
  // cancellation-free form
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  std::vector<double> r;
  if (q != 0.0) {
    r = {q / a, c / q};
  } else {
    r = {0.0, 0.0};
  }
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace

void ModeParams::validate() const {
  if (!((s == 1 || s == -1) && (delta == 1 || delta == -1))) {
    throw InvalidArgument("ModeParams: s and delta must be +1 or -1");
  }
  if (!(omega > 0.0)) throw InvalidArgument("ModeParams: omega must be positive");
  if (!std::isfinite(eta) || !std::isfinite(eta4) || !std::isfinite(eta_cross)) {
    throw InvalidArgument("ModeParams: overlaps must be finite");
  }
}

ModeParams make_mode_params(const OverlapSet& set, const LinearBasis& basis, int s, int delta,
                            double N) {
  ModeParams p;
  p.s = s;
  p.delta = delta;
  p.N = N;
  p.omega = basis.omega;
  p.Omega = basis.Omega;
  const double e0 = set.eta[0];
  const double e1 = set.regime == Regime::case1_eta0_eta4 ? 0.0 : set.eta[1];
  p.eta_cross = e1;
  p.eta = e0 - e1;
  p.eta4 = set.regime == Regime::case3_eta0_eta1 ? 0.0 : set.eta[4];
  p.mu = basis.omega0;
  p.validate();
  return p;
}

std::string to_string(FixedPointFamily f) {
  switch (f) {
    case FixedPointFamily::symmetric: return "symmetric";
    case FixedPointFamily::antisymmetric: return "antisymmetric";
    case FixedPointFamily::asymmetric: return "asymmetric";
  }
  return "unknown";
}

std::string to_string(FixedPointType t) { return t == FixedPointType::center ? "center" : "saddle"; }

Rhs reduced_rhs(const TwoModeState& st, const ModeParams& p) {
  if (!(std::abs(st.z) < 1.0)) {
    throw SingularityError("reduced_rhs: |z| = 1 is a coordinate singularity of theta");
  }
  const double r = std::sqrt(1.0 - st.z * st.z);
  Rhs out;
  out.dz = 2.0 * p.omega * r * std::sin(st.theta);
  out.dtheta = -2.0 * p.omega * st.z * std::cos(st.theta) / r - p.coupling() * st.z;
  return out;
}

double hamiltonian(const TwoModeState& st, const ModeParams& p) {
  if (std::abs(st.z) > 1.0) throw InvalidArgument("hamiltonian: |z| > 1");
  return 2.0 * p.omega * std::sqrt(1.0 - st.z * st.z) * std::cos(st.theta) -
         0.5 * p.coupling() * st.z * st.z;
}

double position_momentum_accel(double z, double q, double cos_theta_sign, const ModeParams& p) {
  const double w = p.omega;
  const double radicand = std::max(4.0 * w * w * (1.0 - z * z) - q * q, 0.0);
  return -4.0 * w * w * z - p.coupling() * z * sgn(cos_theta_sign) * std::sqrt(radicand);
}

double asymmetric_z_squared(const ModeParams& p) {
  const double g = p.coupling();
  if (g == 0.0) return -std::numeric_limits<double>::infinity();
  return 1.0 - 4.0 * p.omega * p.omega / (g * g);
}

std::vector<TwoModeState> asymmetric_z(const ModeParams& p) {
  const double z2 = asymmetric_z_squared(p);
  if (!(z2 >= 0.0)) return {};
  const double z = std::sqrt(z2);
  const double theta = p.coupling() > 0.0 ? kPi : 0.0;
  return {{z, theta}, {-z, theta}};
}

FixedPointFamily parent_for_coupling_sign(double g) {
  return g > 0.0 ? FixedPointFamily::antisymmetric : FixedPointFamily::symmetric;
}

CriticalNorms critical_norms(const ModeParams& p) {
  p.validate();
  CriticalNorms out;
  const double a = p.delta * p.eta4;
  const double b = p.s * p.eta;
  const double two_w = 2.0 * p.omega;
  auto keep = [&out](const std::vector<double>& roots, std::optional<double>& lo,
                     std::optional<double>& hi) {
    std::vector<double> pos;
    for (double r : roots) {
      if (r > 0.0 && std::isfinite(r)) {
        pos.push_back(r);
      } else {
        ++out.discarded;
      }
    }
    if (pos.size() == 2) {
      lo = pos[0];
      hi = pos[1];
    } else if (pos.size() == 1) {
      // with two real roots keep the label of the surviving sign branch
      if (roots.size() == 2 && pos[0] == roots[1]) {
        hi = pos[0];
      } else {
        lo = pos[0];
      }
    }
  };
  // g(N) = -2 s w  and  g(N) = +2 s w
  keep(quadratic_roots(a, b, p.s * two_w, out.discarded), out.N0cr, out.N1cr);
  keep(quadratic_roots(a, b, -p.s * two_w, out.discarded), out.N2cr, out.N3cr);
  return out;
}

FixedPoint fixed_point_stability(const FixedPoint& fp, const ModeParams& p) {
  const Rhs r = reduced_rhs(fp.state, p);
  const double res = std::max(std::abs(r.dz), std::abs(r.dtheta));
  if (!(res <= 1e-10)) throw InvalidArgument("fixed_point_stability: state is not a fixed point");

  const double w = p.omega;
  const double g = p.coupling();
  FixedPoint out = fp;
  if (fp.family == FixedPointFamily::asymmetric) {
    out.lambda_sq = 4.0 * w * w - g * g;
  } else {
    const double c = std::cos(fp.state.theta) > 0.0 ? 1.0 : -1.0;
    out.lambda_sq = -4.0 * w * w - 2.0 * w * c * g;
  }
  out.type = out.lambda_sq > 0.0 ? FixedPointType::saddle : FixedPointType::center;
  return out;
}

std::vector<FixedPoint> census(const ModeParams& p) {
  std::vector<FixedPoint> out;
  out.push_back(fixed_point_stability({{0.0, 0.0}, FixedPointFamily::symmetric, {}, 0.0}, p));
  out.push_back(fixed_point_stability({{0.0, kPi}, FixedPointFamily::antisymmetric, {}, 0.0}, p));
  for (const auto& st : asymmetric_z(p)) {
    if (st.z == 0.0) continue;  // coincides with a parent at the bifurcation point
    FixedPoint fp{st, FixedPointFamily::asymmetric, {}, 0.0};
    // the balance is exact only up to rounding of z^2
    const Rhs r = reduced_rhs(st, p);
    if (std::max(std::abs(r.dz), std::abs(r.dtheta)) <= 1e-10) {
      out.push_back(fixed_point_stability(fp, p));
    }
  }
  return out;
}

std::vector<AmplitudeSolution> stationary_amplitudes(const ModeParams& p,
                                                     FixedPointFamily family) {
  if (family == FixedPointFamily::asymmetric) {
    throw InvalidArgument("stationary_amplitudes: use asymmetric_norm_polynomial");
  }
  const double w_fam = family == FixedPointFamily::symmetric ? p.omega0() : p.omega1();
  int discarded = 0;
  // delta eta4 rho^4 + s eta_sum rho^2 + (w_fam - mu) = 0
  const auto roots = quadratic_roots(p.delta * p.eta4, p.s * p.eta_sum(), w_fam - p.mu, discarded);
  std::vector<AmplitudeSolution> out;
  for (double r : roots) {
    if (r >= 0.0 && std::isfinite(r)) out.push_back({r, r, 2.0 * r});
  }
  return out;
}

std::optional<double> amplitude_mu_bound(const ModeParams& p, FixedPointFamily family) {
  if (p.eta4 == 0.0) return std::nullopt;
  const double w_fam = family == FixedPointFamily::symmetric ? p.omega0() : p.omega1();
  // discriminant eta_sum^2 - 4 delta eta4 (w_fam - mu) >= 0
  return w_fam - p.eta_sum() * p.eta_sum() / (4.0 * p.delta * p.eta4);
}

std::pair<double, double> projected_residual(double cl, double cr, const ModeParams& p) {
  const double e0 = p.eta0();
  const double e1 = p.eta_cross;
  auto one = [&](double a, double b) {
    return -(p.mu * a) + p.Omega * a - p.omega * b + p.s * (e0 * a * a + e1 * b * b) * a +
           p.delta * p.eta4 * a * a * a * a * a;
  };
  return {one(cl, cr), one(cr, cl)};
}

double parent_mu(const ModeParams& p, FixedPointFamily family, double n) {
  const double w_fam = family == FixedPointFamily::symmetric ? p.omega0() : p.omega1();
  return w_fam + 0.5 * p.s * p.eta_sum() * n + 0.25 * p.delta * p.eta4 * n * n;
}

NormPolynomial asymmetric_norm_polynomial(const ModeParams& p) {
  p.validate();
  const double a = p.delta * p.eta4;
  const double b = p.s * p.eta0();
  const double c = -(p.mu - p.Omega);
  const double e = p.s * p.eta;
  const double w2 = p.omega * p.omega;

  NormPolynomial out;
  out.coefficients = {c * e * e - a * w2, b * e * e + 2.0 * a * c * e,
                      a * e * e + 2.0 * a * b * e + a * a * c, 2.0 * a * a * e + a * a * b,
                      a * a * a};

  int degree = 4;
  while (degree > 0 && out.coefficients[degree] == 0.0) --degree;
  if (degree == 0) return out;

  // companion matrix of the monic polynomial
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(degree, degree);
  const double lead = out.coefficients[degree];
  for (int i = 0; i < degree; ++i) comp(0, i) = -out.coefficients[degree - 1 - i] / lead;
  for (int i = 1; i < degree; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  const auto ev = es.eigenvalues();

  const double four_w2 = 4.0 * w2;
  for (int i = 0; i < ev.size(); ++i) {
    const double re = ev[i].real();
    const double scale = std::max(1.0, std::abs(re));
    if (std::abs(ev[i].imag()) > 1e-9 * scale || !(re > 0.0)) {
      ++out.discarded;
      continue;
    }
    // polish with Newton on the original polynomial
    double n = re;
    for (int it = 0; it < 4; ++it) {
      double f = 0.0, df = 0.0;
      for (int k = degree; k >= 0; --k) {
        df = df * n + f;
        f = f * n + out.coefficients[k];
      }
      if (df == 0.0) break;
      n -= f / df;
    }
    const double g = p.coupling_at(n);
    if (g * g < four_w2 * (1.0 - 1e-12)) {
      ++out.discarded;
      continue;
    }
    out.roots.push_back(n);
  }
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

namespace {

struct PhaseState {
  double z, theta;
};

PhaseState rk4_step(const PhaseState& y, double h, const ModeParams& p) {
  auto f = [&p](const PhaseState& s) {
    const Rhs r = reduced_rhs({s.z, s.theta}, p);
    return PhaseState{r.dz, r.dtheta};
  };
  const PhaseState k1 = f(y);
  const PhaseState k2 = f({y.z + 0.5 * h * k1.z, y.theta + 0.5 * h * k1.theta});
  const PhaseState k3 = f({y.z + 0.5 * h * k2.z, y.theta + 0.5 * h * k2.theta});
  const PhaseState k4 = f({y.z + h * k3.z, y.theta + h * k3.theta});
  return {y.z + h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
          y.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta)};
}

}  // namespace

Orbit integrate_orbit(const TwoModeState& initial, const ModeParams& p, double t_end, double dt) {
  p.validate();
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw InvalidArgument("integrate_orbit: need dt > 0");
  if (!(std::abs(initial.z) < 1.0)) throw SingularityError("integrate_orbit: |z0| must be < 1");

  const double h0 = hamiltonian(initial, p);
  const double scale = std::max(std::abs(h0), 2.0 * p.omega);
  const double step_tol = 1e-8 * scale;
  constexpr int kMaxDepth = 12;

  Orbit orbit;
  auto record = [&](double t, const PhaseState& y) {
    const TwoModeState st{y.z, y.theta};
    const double e = hamiltonian(st, p);
    orbit.samples.push_back({t, y.z, y.theta, reduced_rhs(st, p).dz, e});
    orbit.max_relative_drift = std::max(orbit.max_relative_drift, std::abs(e - h0) / scale);
  };

  PhaseState y{initial.z, initial.theta};
  record(0.0, y);
  const long steps = std::lround(t_end / dt);
  for (long k = 1; k <= steps; ++k) {
    const double e_start = hamiltonian({y.z, y.theta}, p);
    PhaseState next{};
    for (int depth = 0;; ++depth) {
      const int sub = 1 << depth;
      const double h = dt / sub;
      next = y;
      try {
        for (int j = 0; j < sub; ++j) next = rk4_step(next, h, p);
      } catch (const SingularityError&) {
        if (depth == kMaxDepth) throw;
        continue;
      }
      if (!(std::abs(next.z) < 1.0)) {
        if (depth == kMaxDepth) throw SingularityError("integrate_orbit: orbit reached |z| = 1");
        continue;
      }
      const double err = std::abs(hamiltonian({next.z, next.theta}, p) - e_start);
      if (err <= step_tol / std::max<long>(steps, 1) || depth == kMaxDepth) {
        orbit.halvings = std::max(orbit.halvings, depth);
        break;
      }
    }
    y = next;
    record(k * dt, y);
  }
  return orbit;
}

std::vector<PredictedEvent> predicted_bifurcations(const ModeParams& p) {
  const CriticalNorms cn = critical_norms(p);
  std::vector<PredictedEvent> out;
  auto add = [&](const std::optional<double>& n, double g_sign, const char* label) {
    if (!n) return;
    const FixedPointFamily parent = parent_for_coupling_sign(g_sign);
    out.push_back({parent, *n, parent_mu(p, parent, *n), label});
  };
  // pair (N0, N1): g = -2 s w; pair (N2, N3): g = +2 s w
  add(cn.N0cr, -p.s, "N0cr");
  add(cn.N1cr, -p.s, "N1cr");
  add(cn.N2cr, p.s, "N2cr");
  add(cn.N3cr, p.s, "N3cr");
  return out;
}

}  // namespace cqdw
