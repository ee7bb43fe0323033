#include "cqdw/pipeline.hpp"
#include "cqdw/stability.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cqdw;

namespace {

const Scenario& scenario() {
  static const Scenario sc = [] {
    RunConfig c;
    c.cubic = {"gaussian", 1.0};
    c.quintic = {"gaussian", 1.0};
    return make_scenario(c);
  }();
  return sc;
}

double onset(double mu, double dt) {
  const StationaryState st = parity_state_at(scenario(), SymmetryClass::antisymmetric, mu);
  EvolutionOptions o;
  o.dt = dt;
  o.keep_snapshots = false;
  const ComplexVector init = perturbed_initial(scenario(), st);
  return asymmetry_onset(evolve(scenario().model, init, mu, 160.0, o, Parity::odd)).value_or(NAN);
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("stationary state is a fixed point of the stepper") {
    const StationaryState st = parity_state_at(scenario(), SymmetryClass::antisymmetric, 0.19);
    EvolutionOptions o;
    o.keep_snapshots = true;
    o.sample_interval = 10.0;
    const EvolutionRun run =
        evolve(scenario().model, st.psi.cast<std::complex<double>>(), st.mu, 100.0, o);
    const ComplexVector& last = run.snapshots.back();
    CHECK((last - st.psi.cast<std::complex<double>>()).norm() * std::sqrt(0.1) < 1e-6);
  }

  TEST_CASE("mirror equivariance") {
    const Grid& g = scenario().model.grid();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ComplexVector psi = ComplexVector::Zero(g.n_points);
    for (int i = 1; i + 1 < g.n_points; ++i) {
      const double x = g.points[i];
      psi[i] = {std::exp(-std::pow(x - 2.0, 2)) + 0.6 * std::exp(-std::pow(x + 1.5, 2)),
                0.2 * uni(rng) * std::exp(-x * x / 8.0)};
    }
    EvolutionOptions o;
    o.sample_interval = 20.0;
    const auto a = evolve(scenario().model, psi, 0.2, 20.0, o);
    const auto b = evolve(scenario().model, reflect(psi), 0.2, 20.0, o);
    CHECK((reflect(a.snapshots.back()) - b.snapshots.back()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(a.max_norm_drift < 1e-10);
  }

  TEST_CASE("onset time is stable under step halving") {
    const double t1 = onset(0.25, 5e-3);
    const double t2 = onset(0.25, 2.5e-3);
    REQUIRE(std::isfinite(t1));
    CHECK(std::abs(t1 - t2) / t2 <= 0.05);
  }

  TEST_CASE("screened Poisson equals exponential-kernel convolution") {
    const Grid& g = scenario().model.grid();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int k = 0; k < 5; ++k) {
      const double d = 0.3 + 3.0 * uni(rng);
      const double x0 = 10.0 * (uni(rng) - 0.5);
      ComplexVector u(g.n_points);
      for (int i = 0; i < g.n_points; ++i) u[i] = 0.9 * std::exp(-std::pow(g.points[i] - x0, 2) / 3.0);
      const RealVector src = saturable_source(u, 1.0 + uni(rng));
      const RealVector m = solve_screened_poisson(g, src, d);
      CHECK((m - oracle::convolve("exponential", std::sqrt(d), g, src)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("growth fit on a synthetic series") {
    EvolutionRun run;
    for (int k = 0; k <= 200; ++k) {
      run.times.push_back(0.5 * k);
      run.breaking_series.push_back(1e-4 * std::exp(0.07 * 0.5 * k));
    }
    const GrowthFit f = fit_growth(run, 0.0, 0.1);
    CHECK(f.rate == doctest::Approx(0.07).epsilon(1e-10));
    CHECK(f.t_end < 100.0);
  }

  TEST_CASE("phase-plane projection of the left mode") {
    const LinearBasis& b = scenario().basis;
    const PhaseSample s = project_state(scenario().model.grid(), b.phi_left, b.phi_right,
                                        b.phi_left.cast<std::complex<double>>(), 0.0);
    CHECK(s.z == doctest::Approx(1.0));
    CHECK_FALSE(s.theta_defined);
  }
}
