#include "cqdw/overlaps.hpp"
#include "cqdw/two_mode.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cqdw;

namespace {

const Grid& grid() {
  static const Grid g = build_grid(20.0, 0.1);
  return g;
}

const LinearBasis& basis() {
  static const LinearBasis b = compute_linear_basis(grid(), PotentialParams{});
  return b;
}

ModeParams params(double sigma, int s = 1, int delta = -1) {
  const Kernel k = Kernel::gaussian(sigma);
  return make_mode_params(compute_overlaps(grid(), basis(), k, k), basis(), s, delta);
}

}  // namespace

TEST_SUITE("discretization") {
  TEST_CASE("grid layout") {
    const Grid& g = grid();
    CHECK(g.n_points == 401);
    CHECK(g.points[0] == doctest::Approx(-20.0));
    CHECK(g.points[g.center_index()] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(g.weights().sum() == doctest::Approx(40.0));
    CHECK_THROWS(build_grid(20.0, -0.1));
  }

  TEST_CASE("operator matches a hand-built stencil") {
    const PotentialParams p;
    const TridiagonalOperator op = discretize_operator(grid(), p);
    const double h = grid().spacing;
    RealVector f(grid().n_points);
    for (int i = 0; i < f.size(); ++i) f[i] = std::exp(-std::pow(grid().points[i] - 1.0, 2));
    f[0] = f[f.size() - 1] = 0.0;
    const RealVector lf = op.apply(f);
    for (int i = 1; i + 1 < f.size(); ++i) {
      const double x = grid().points[i];
      const double v = 0.5 * 0.01 * x * x + 1.0 / std::pow(std::cosh(x / 0.5), 2);
      const double ref = -0.5 * (f[i - 1] - 2.0 * f[i] + f[i + 1]) / (h * h) + v * f[i];
      CHECK(lf[i] == doctest::Approx(ref).epsilon(1e-12));
    }
  }

  TEST_CASE("reflection and imbalance") {
    RealVector f(grid().n_points);
    for (int i = 0; i < f.size(); ++i) f[i] = std::exp(-std::pow(grid().points[i] - 3.0, 2));
    CHECK((reflect(reflect(f)) - f).norm() == 0.0);
    CHECK(density_imbalance(grid(), f) == doctest::Approx(-density_imbalance(grid(), reflect(f))));
  }
}

TEST_SUITE("linear_spectrum") {
  TEST_CASE("lowest pair and rotated basis") {
    const LinearBasis& b = basis();
    CHECK(b.omega0 == doctest::Approx(0.13282).epsilon(4e-3));
    CHECK(b.omega1 > b.omega0);
    const Grid& g = grid();
    CHECK(inner(g, b.u0, b.u0) == doctest::Approx(1.0));
    CHECK(std::abs(inner(g, b.u0, b.u1)) < 1e-12);
    CHECK(std::abs(inner(g, b.phi_left, b.phi_right)) < 1e-12);
    CHECK((reflect(b.u0) - b.u0).norm() < 1e-10);
    CHECK((reflect(b.u1) + b.u1).norm() < 1e-10);
    CHECK((reflect(b.phi_left) - b.phi_right).norm() < 1e-10);
    // phi_left lives in x < 0
    CHECK(density_imbalance(g, b.phi_left.cwiseAbs2()) > 0.9);
  }
}

TEST_SUITE("overlaps") {
  TEST_CASE("fast convolution against the direct sum") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (const char* fam : {"gaussian", "exponential"}) {
      for (double sigma : {0.05, 0.7, 12.0}) {
        RealVector f(grid().n_points);
        for (int i = 0; i < f.size(); ++i) f[i] = uni(rng);
        const Kernel k{kernel_family_from_string(fam), sigma};
        const double err = (convolve(k, grid(), f) - oracle::convolve(fam, sigma, grid(), f))
                               .cwiseAbs()
                               .maxCoeff();
        CHECK(err < 1e-10);
      }
    }
  }

  TEST_CASE("interchange and mirror symmetries of the twelve integrals") {
    const Kernel k = Kernel::exponential(1.3);
    const OverlapSet set = compute_overlaps(grid(), basis(), k, k);
    const RealVector& l = basis().phi_left;
    const RealVector& r = basis().phi_right;
    for (int i = 0; i < 12; ++i) {
      const auto [f, g] = overlap_integrand(i, l, r);
      const auto [fm, gm] = overlap_integrand(i, r, l);
      const double swapped = oracle::overlap("exponential", 1.3, grid(), g, f);
      const double mirrored = oracle::overlap("exponential", 1.3, grid(), fm, gm);
      CHECK(set.eta[i] == doctest::Approx(swapped).epsilon(1e-10));
      CHECK(set.eta[i] == doctest::Approx(mirrored).epsilon(1e-10));
    }
  }

  TEST_CASE("eta_rel criteria") {
    const Kernel k = Kernel::gaussian(1.0);
    const OverlapSet set = compute_overlaps(grid(), basis(), k, k);
    CHECK(eta_rel(set, EtaCriterion::eta1) ==
          doctest::Approx(set.eta[1] - std::max(std::abs(set.eta[2]), std::abs(set.eta[3]))));
    CHECK(eta_rel(set, EtaCriterion::eta4) ==
          doctest::Approx(set.eta[4] - std::max(std::abs(set.eta[2]), std::abs(set.eta[3]))));
  }
}

TEST_SUITE("two_mode") {
  TEST_CASE("flow is Hamiltonian") {
    ModeParams p = params(1.0);
    p.N = 3.0;
    const double e = 1e-6;
    for (double z : {-0.7, -0.2, 0.1, 0.5, 0.9}) {
      for (double th : {0.0, 0.8, 2.0, 3.1}) {
        const double hz = (hamiltonian({z + e, th}, p) - hamiltonian({z - e, th}, p)) / (2 * e);
        const double ht = (hamiltonian({z, th + e}, p) - hamiltonian({z, th - e}, p)) / (2 * e);
        const Rhs f = reduced_rhs({z, th}, p);
        CHECK(f.dz == doctest::Approx(-ht).epsilon(1e-7));
        CHECK(f.dtheta == doctest::Approx(hz).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("critical norms solve g = -+2 s omega") {
    const ModeParams p = params(1.0);
    const CriticalNorms c = critical_norms(p);
    REQUIRE(c.N1cr);
    CHECK(p.coupling_at(*c.N1cr) == doctest::Approx(-2.0 * p.omega).epsilon(1e-10));
    if (c.N2cr) CHECK(p.coupling_at(*c.N2cr) == doctest::Approx(2.0 * p.omega).epsilon(1e-10));
    if (c.N3cr) CHECK(p.coupling_at(*c.N3cr) == doctest::Approx(2.0 * p.omega).epsilon(1e-10));
  }

  TEST_CASE("flipping both signs keeps the critical norms and swaps the parents") {
    const auto a = predicted_bifurcations(params(0.1, 1, -1));
    const auto b = predicted_bifurcations(params(0.1, -1, 1));
    REQUIRE(a.size() == b.size());
    REQUIRE(!a.empty());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].label == b[k].label);
      CHECK(a[k].N == doctest::Approx(b[k].N).epsilon(1e-12));
      CHECK(a[k].parent != b[k].parent);
    }
  }

  TEST_CASE("quartic norm roots are asymmetric stationary points") {
    ModeParams p = params(0.1);
    int checked = 0;
    for (double mu : {0.2, 0.3}) {
      p.mu = mu;
      for (double n : asymmetric_norm_polynomial(p).roots) {
        ModeParams q = p;
        q.N = n;
        for (const auto& st : asymmetric_z(q)) {
          const double cl = std::sqrt(n * (1 + st.z) / 2);
          const double cr = std::sqrt(n * (1 - st.z) / 2) * (std::cos(st.theta) < 0 ? -1.0 : 1.0);
          const auto [rl, rr] = projected_residual(cl, cr, q);
          CHECK(std::abs(rl) < 1e-10);
          CHECK(std::abs(rr) < 1e-10);
          ++checked;
        }
      }
    }
    CHECK(checked > 0);
  }

  TEST_CASE("quartic coefficients in the single-overlap regime") {
    ModeParams p = params(0.1);
    p.mu = 0.25;
    REQUIRE(p.eta_cross == 0.0);
    const double d = p.delta, s = p.s, e0 = p.eta0(), e4 = p.eta4, w = p.omega, m = p.mu - p.Omega;
    const std::vector<double> ref = {-d * e4 * w * w - e0 * e0 * m,
                                     s * s * s * e0 * e0 * e0 - 2 * s * d * e0 * e4 * m,
                                     3 * d * e4 * e0 * e0 - e4 * e4 * m, 3 * s * e4 * e4 * e0,
                                     d * d * d * e4 * e4 * e4};
    const auto c = asymmetric_norm_polynomial(p).coefficients;
    REQUIRE(c.size() == ref.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      CHECK(c[k] == doctest::Approx(ref[k]).epsilon(1e-12).scale(1e-6));
    }
  }

  TEST_CASE("quartic roots solve the projected equations with the cross overlap") {
    const Kernel k = Kernel::gaussian(5.0);
    const auto th = compute_thresholds(grid(), basis(), KernelFamily::gaussian);
    ModeParams p = make_mode_params(compute_overlaps(grid(), basis(), k, k, th), basis(), 1, -1);
    REQUIRE(p.eta_cross != 0.0);
    int checked = 0;
    for (double mu : {0.18, 0.22, 0.26}) {
      p.mu = mu;
      for (double n : asymmetric_norm_polynomial(p).roots) {
        ModeParams q = p;
        q.N = n;
        for (const auto& st : asymmetric_z(q)) {
          const double cl = std::sqrt(n * (1 + st.z) / 2);
          const double cr = std::sqrt(n * (1 - st.z) / 2) * (std::cos(st.theta) < 0 ? -1.0 : 1.0);
          const auto [rl, rr] = projected_residual(cl, cr, q);
          CHECK(std::abs(rl) < 1e-10);
          CHECK(std::abs(rr) < 1e-10);
          ++checked;
        }
      }
    }
    CHECK(checked > 0);
  }

  TEST_CASE("orbit energy drift") {
    ModeParams p = params(1.0);
    p.N = 5.0;
    const Orbit o = integrate_orbit({0.3, 1.0}, p, 100.0, 0.01);
    CHECK(o.max_relative_drift < 1e-8);
  }
}
