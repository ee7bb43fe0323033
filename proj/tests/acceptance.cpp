// Acceptance run: one PASS/FAIL line per criterion.
//
//   cqdw_acceptance [--criterion K]
//
// Without --criterion every criterion runs in order. Exit status is zero
// only when every selected criterion passes.

#include "cqdw/presets.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

using namespace cqdw;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // |measured - target| <= tol, appended to the detail line
  bool near(const std::string& what, double measured, double target, double tol) {
    const bool ok = std::isfinite(measured) && std::abs(measured - target) <= tol;
    detail << (detail.tellp() > 0 ? "; " : "") << what << " " << fmt(measured) << " vs "
           << target << "+-" << tol << (ok ? "" : " [miss]");
    pass = pass && ok;
    return ok;
  }
  bool require(const std::string& what, bool ok) {
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? " yes" : " NO");
    pass = pass && ok;
    return ok;
  }
  void note(const std::string& s) { detail << (detail.tellp() > 0 ? "; " : "") << s; }

  static std::string fmt(double v) {
    if (!std::isfinite(v)) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

RunConfig config(double sigma, int s = 1, int delta = -1, const std::string& family = "gaussian") {
  RunConfig c;
  c.cubic = {family, sigma};
  c.quintic = {family, sigma};
  c.s = s;
  c.delta = delta;
  return c;
}

// one cached workbench per (sigma, s, delta, family)
Workbench& bench(double sigma, int s = 1, int delta = -1, const std::string& family = "gaussian") {
  static std::map<std::string, std::unique_ptr<Workbench>> cache;
  const std::string key = family + "/" + std::to_string(sigma) + "/" + std::to_string(s) + "/" +
                          std::to_string(delta);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<Workbench>(config(sigma, s, delta, family))).first;
  }
  return *it->second;
}

double first_ssb(const Branch& parent) {
  const auto ev = symmetry_breaking_events(parent);
  return ev.empty() ? NAN : ev.front().mu;
}

double first_merge(const BranchFamily& f) {
  if (f.daughters.empty()) return NAN;
  const auto m = events_of(f.daughters.front(), EventType::merge);
  return m.empty() ? NAN : m.front().mu;
}

// --- 1 ------------------------------------------------------------------------

Outcome linear_spectrum() {
  Outcome o;
  const Scenario& sc = bench(1.0).scenario();
  o.near("omega0", sc.basis.omega0, 0.13282, 5e-4);
  o.near("omega1", sc.basis.omega1, 0.15571, 5e-4);
  return o;
}

// --- 2 ------------------------------------------------------------------------

Outcome regime_thresholds() {
  Outcome o;
  const auto g = bench(1.0).thresholds_for(KernelFamily::gaussian);
  const auto e = bench(1.0).thresholds_for(KernelFamily::exponential);
  o.near("sigma_b gaussian", g.sigma_b, 2.96, 0.05);
  o.near("sigma_b exponential", e.sigma_b, 1.56, 0.05);
  o.near("sigma_c gaussian", g.sigma_c, 9.15, 0.15);
  o.near("sigma_c exponential", e.sigma_c, 7.01, 0.15);
  return o;
}

// --- 3 ------------------------------------------------------------------------

Outcome critical_norms_check() {
  Outcome o;
  Workbench& wb = bench(1.0);
  o.near("N1cr", wb.measure("twomode.N1cr"), 4.9862, 1e-3);
  o.near("z at N=5", wb.measure("twomode.asymmetric_z"), 0.4318, 1e-3);
  o.near("N2cr/N3cr coalescence sigma", wb.measure("twomode.coalescence_sigma"), 7.52, 0.1);
  return o;
}

// --- 4 ------------------------------------------------------------------------

// lambda^2 of the z = 0 point of `family` at norm n
double parent_lambda_sq(const ModeParams& base, FixedPointFamily family, double n) {
  ModeParams p = base;
  p.N = n;
  FixedPoint fp;
  fp.family = family;
  fp.state = {0.0, family == FixedPointFamily::antisymmetric ? M_PI : 0.0};
  return fixed_point_stability(fp, p).lambda_sq;
}

// sign changes of f on (0, n_max], bisected to 1e-13
std::vector<double> zero_crossings(const std::function<double(double)>& f, double n_max, int samples) {
  std::vector<double> out;
  double a = n_max / samples;
  double fa = f(a);
  for (int k = 2; k <= samples; ++k) {
    const double b = n_max * k / samples;
    const double fb = f(b);
    if ((fa > 0.0) != (fb > 0.0)) {
      double lo = a, hi = b;
      const bool pos_lo = fa > 0.0;
      while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) > 0.0) == pos_lo ? lo : hi) = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return out;
}

Outcome two_mode_windows() {
  Outcome o;
  Workbench& wb = bench(0.1);
  const ModeParams& p = wb.mode_params();
  const auto zc = zero_crossings(
      [&](double n) { return parent_lambda_sq(p, FixedPointFamily::antisymmetric, n); }, 6.0, 600);
  o.require("two antisymmetric lambda^2 sign changes", zc.size() == 2);
  o.near("first sign change N", zc.size() > 0 ? zc[0] : NAN, 0.14, 0.02);
  o.near("second sign change N", zc.size() > 1 ? zc[1] : NAN, 4.63, 0.05);
  o.near("asymmetric existence start N", wb.measure("twomode.asymmetric_N_min"), 0.03, 0.01);
  o.near("asymmetric existence end N", wb.measure("twomode.asymmetric_N_max"), 4.75, 0.05);
  return o;
}

// --- 5 ------------------------------------------------------------------------

// Pitchforks on the symmetric parent up to its first fold, or within
// 1e-3 in mu of that fold.
std::vector<BranchEvent> scanned_pitchforks(const Branch& parent, double& fold_mu) {
  const auto folds = events_of(parent, EventType::fold);
  fold_mu = folds.empty() ? NAN : folds.front().mu;
  const int fold_index = folds.empty() ? 1 << 30 : folds.front().index;
  std::vector<BranchEvent> out;
  for (const auto& e : events_of(parent, EventType::pitchfork)) {
    if (e.index <= fold_index || (!folds.empty() && std::abs(e.mu - fold_mu) <= 1e-3)) out.push_back(e);
  }
  return out;
}

Outcome pde_bifurcations() {
  Outcome o;
  struct Row {
    double sigma, ssb, restore, sym;
  };
  for (const Row r : {Row{0.1, 0.1686, 0.381, 0.359}, Row{1.0, 0.168, 0.374, 0.355}}) {
    Workbench& wb = bench(r.sigma);
    const std::string tag = "sigma=" + Outcome::fmt(r.sigma) + " ";
    const BranchFamily& a = wb.family(SymmetryClass::antisymmetric);
    o.near(tag + "antisymmetric SSB mu", first_ssb(a.parent), r.ssb, 0.002);
    o.near(tag + "restoring merge mu", first_merge(a), r.restore, 0.005);
    o.near(tag + "symmetric pitchfork mu", first_ssb(wb.family(SymmetryClass::symmetric).parent),
           r.sym, 0.005);
  }
  Workbench& wb = bench(8.0);
  const BranchFamily& a = wb.family(SymmetryClass::antisymmetric);
  o.near("sigma=8 antisymmetric SSB mu", first_ssb(a.parent), 0.195, 0.003);
  const double merge = first_merge(a);
  o.require("sigma=8 restoring merge exists (mu " + Outcome::fmt(merge) + ")", std::isfinite(merge));
  double fold_mu = NAN;
  const Branch& sym = wb.family(SymmetryClass::symmetric).parent;
  const auto in_range = scanned_pitchforks(sym, fold_mu);
  o.require("sigma=8 no symmetric pitchfork up to the first fold (mu " + Outcome::fmt(fold_mu) + ")",
            in_range.empty());
  for (const auto& e : events_of(sym, EventType::pitchfork)) {
    o.note("post-fold symmetric pitchfork at mu " + Outcome::fmt(e.mu) + ", N " + Outcome::fmt(e.N));
  }
  return o;
}

// --- 6 ------------------------------------------------------------------------

Outcome focusing_bifurcations() {
  Outcome o;
  Workbench& wb = bench(1.0, -1, 1);
  const BranchFamily& s = wb.family(SymmetryClass::symmetric);
  o.near("symmetric SSB mu", first_ssb(s.parent), 0.1212, 0.002);
  o.near("restoring mu", first_merge(s), -0.0727, 0.003);
  o.near("antisymmetric event mu", first_ssb(wb.family(SymmetryClass::antisymmetric).parent),
         -0.0465, 0.003);
  return o;
}

// --- 7 ------------------------------------------------------------------------

Outcome reduction_predictions() {
  Outcome o;
  struct Row {
    double sigma;
    int s, d;
    const char* label;
    double value;
  };
  const Row rows[] = {{0.1, 1, -1, "N2cr", 0.1679},  {0.1, 1, -1, "N3cr", 0.3723},
                      {0.1, 1, -1, "N1cr", 0.3492},  {1.0, 1, -1, "N2cr", 0.1673},
                      {1.0, 1, -1, "N3cr", 0.364},   {1.0, 1, -1, "N1cr", 0.342},
                      {8.0, 1, -1, "N2cr", 0.1981},  {1.0, -1, 1, "N2cr", 0.1212},
                      {1.0, -1, 1, "N3cr", -0.0755}, {1.0, -1, 1, "N1cr", -0.0526}};
  for (const Row& r : rows) {
    const double mu = bench(r.sigma, r.s, r.d).measure(std::string("twomode.mu_") + r.label);
    o.near("sigma=" + Outcome::fmt(r.sigma) + (r.s < 0 ? " (-1,1) " : " ") + r.label + " mu", mu,
           r.value, 1e-3);
  }
  return o;
}

// --- dynamics (8, 9, 13) -------------------------------------------------------

struct DynamicsResult {
  double mu = 0.0;
  std::optional<double> onset;
  double drift = 0.0;
  double bdg_rate = 0.0;
  GrowthFit fit;
};

DynamicsResult run_dynamics(double mu, PerturbationKind kind, double t_end) {
  static std::map<std::pair<double, int>, DynamicsResult> cache;
  const auto key = std::make_pair(mu, static_cast<int>(kind));
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  RunConfig c = config(1.0);
  c.evolve_mu = mu;
  c.perturbation = kind;
  c.t_end = t_end;
  Workbench wb(c);
  DynamicsResult r;
  r.mu = mu;
  const EvolutionRun& run = wb.evolution();
  r.onset = asymmetry_onset(run);
  r.drift = run.max_norm_drift;
  r.bdg_rate = wb.measure("dynamics.bdg_rate");
  r.fit = fit_growth(run, 0.0, 0.1);
  cache.emplace(key, r);
  return r;
}

Outcome dynamics_onset() {
  Outcome o;
  const auto a = run_dynamics(0.19, PerturbationKind::eigenvector, 300.0);
  const auto b = run_dynamics(0.25, PerturbationKind::eigenvector, 150.0);
  const double ta = a.onset.value_or(NAN);
  const double tb = b.onset.value_or(NAN);
  o.require("mu=0.19 onset t=" + Outcome::fmt(ta) + " in [150, 300]", ta >= 150.0 && ta <= 300.0);
  o.require("mu=0.25 onset t=" + Outcome::fmt(tb) + " in [70, 150]", tb >= 70.0 && tb <= 150.0);
  // seeded white noise of the same norm, for comparison only
  const auto ra = run_dynamics(0.19, PerturbationKind::random, 450.0);
  const auto rb = run_dynamics(0.25, PerturbationKind::random, 250.0);
  o.note("random-noise onsets (not gated) t=" + Outcome::fmt(ra.onset.value_or(NAN)) + " and t=" +
         Outcome::fmt(rb.onset.value_or(NAN)));
  return o;
}

Outcome conservation() {
  Outcome o;
  double worst = 0.0;
  int runs = 0;
  for (const auto& [mu, kind, t] :
       {std::tuple{0.19, PerturbationKind::eigenvector, 300.0},
        std::tuple{0.25, PerturbationKind::eigenvector, 150.0},
        std::tuple{0.19, PerturbationKind::random, 450.0},
        std::tuple{0.25, PerturbationKind::random, 250.0}}) {
    worst = std::max(worst, run_dynamics(mu, kind, t).drift);
    ++runs;
  }
  o.require(std::to_string(runs) + " evolutions, max norm drift " + sci(worst) + " <= 1e-8",
            worst <= 1e-8);

  double orbit_worst = 0.0;
  int orbits = 0;
  for (const auto& [sigma, n] : {std::pair{1.0, 5.0}, std::pair{0.1, 0.5}, std::pair{0.1, 2.0},
                                 std::pair{0.1, 4.7}}) {
    ModeParams p = bench(sigma).mode_params();
    p.N = n;
    for (double z0 : {-0.9, -0.5, -0.1, 0.2, 0.6, 0.95}) {
      for (double th0 : {0.0, 1.0, 2.5, M_PI}) {
        orbit_worst = std::max(orbit_worst, integrate_orbit({z0, th0}, p, 200.0, 0.01).max_relative_drift);
        ++orbits;
      }
    }
  }
  o.require(std::to_string(orbits) + " orbits, max Hamiltonian drift " + sci(orbit_worst) + " <= 1e-8",
            orbit_worst <= 1e-8);
  return o;
}

Outcome growth_rate_match() {
  Outcome o;
  for (const auto& [mu, t] : {std::pair{0.19, 300.0}, std::pair{0.25, 150.0}}) {
    const auto r = run_dynamics(mu, PerturbationKind::eigenvector, t);
    const double rel = std::abs(r.fit.rate - r.bdg_rate) / r.bdg_rate;
    o.require("mu=" + Outcome::fmt(mu) + " fitted rate " + Outcome::fmt(r.fit.rate) + " vs max Re " +
                  Outcome::fmt(r.bdg_rate) + " (rel " + sci(rel) + ", window t in [" +
                  Outcome::fmt(r.fit.t_begin) + ", " + Outcome::fmt(r.fit.t_end) + "]) within 10%",
              r.bdg_rate > 0.0 && r.fit.samples >= 10 && rel <= 0.1);
  }
  return o;
}

// --- 10 -----------------------------------------------------------------------

Outcome bdg_structure() {
  Outcome o;
  int states = 0;
  double worst_zero = 0.0, worst_quartet = 0.0;
  auto scan = [&](const NlsModel& model, const Branch& b) {
    for (const auto& st : b.states) {
      const BdgSpectrum sp = solve_bdg(build_bdg(model, st), {BdgMethod::block});
      worst_zero = std::max(worst_zero, sp.min_abs);
      worst_quartet = std::max(worst_quartet, sp.quartet_defect);
      ++states;
    }
  };
  Workbench& a = bench(0.1);
  const BranchFamily& fa = a.family(SymmetryClass::antisymmetric);
  scan(a.scenario().model, fa.parent);
  for (const auto& d : fa.daughters) scan(a.scenario().model, d);
  Workbench& f = bench(1.0, -1, 1);
  scan(f.scenario().model, f.family(SymmetryClass::symmetric).parent);
  o.note(std::to_string(states) +
         " states (sigma=0.1 antisymmetric branch and its asymmetric daughter, sigma=1 (-1,1) "
         "symmetric branch), full block spectra");
  o.require("max over states of min|lambda| " + sci(worst_zero) + " <= 1e-6", worst_zero <= 1e-6);
  o.require("max quartet defect " + sci(worst_quartet) + " <= 1e-6", worst_quartet <= 1e-6);
  return o;
}

// --- 11 -----------------------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome o;
  const Grid g = build_grid(20.0, 0.1);
  const LinearBasis basis = compute_linear_basis(g, PotentialParams{});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  double conv_err = 0.0;
  double eta_err = 0.0;
  const RealVector& L = basis.phi_left;
  const RealVector& R = basis.phi_right;
  for (const std::string family : {"gaussian", "exponential"}) {
    for (double sigma : {0.1, 1.0, 3.0, 8.0}) {
      const Kernel k{kernel_family_from_string(family), sigma};
      for (int trial = 0; trial < 3; ++trial) {
        RealVector f(g.n_points);
        const double x0 = 8.0 * uni(rng);
        for (int i = 0; i < g.n_points; ++i) {
          f[i] = std::exp(-std::pow(g.points[i] - x0, 2) / 4.0) * (1.0 + 0.3 * uni(rng));
        }
        conv_err = std::max(conv_err, (convolve(k, g, f) - oracle::convolve(family, sigma, g, f))
                                          .cwiseAbs()
                                          .maxCoeff());
      }
      // brute-force double sums for all twelve overlaps
      const OverlapSet set = compute_overlaps(g, basis, k, k);
      const double mass = oracle::lattice_mass(family, sigma, g.spacing);
      const RealVector l2 = L.cwiseProduct(L), r2 = R.cwiseProduct(R), lr = L.cwiseProduct(R);
      const RealVector l4 = l2.cwiseProduct(l2), l2r2 = l2.cwiseProduct(r2), l3r = l2.cwiseProduct(lr);
      const RealVector* fs[12] = {&l2, &l2, &l2, &lr, &l4, &l4, &l4, &l2r2, &l2r2, &l3r, &l3r, &l3r};
      const RealVector* gs[12] = {&l2, &r2, &lr, &lr, &l2, &r2, &lr, &l2, &lr, &l2, &r2, &lr};
      for (int idx = 0; idx < 12; ++idx) {
        double acc = 0.0;
        for (int i = 0; i < g.n_points; ++i) {
          for (int j = 0; j < g.n_points; ++j) {
            acc += g.weight(i) * g.weight(j) * oracle::kernel(family, sigma, g.points[i] - g.points[j]) *
                   (*fs[idx])[j] * (*gs[idx])[i];
          }
        }
        eta_err = std::max(eta_err, std::abs(set.eta[idx] - acc / mass));
      }
    }
  }
  o.require("FFT vs O(n^2) convolution max error " + sci(conv_err) + " <= 1e-8", conv_err <= 1e-8);
  o.require("eta_0..11 vs double sums max error " + sci(eta_err) + " <= 1e-8", eta_err <= 1e-8);

  double poisson_err = 0.0;
  for (int s = 0; s < 5; ++s) {
    const double d = 0.25 + 2.0 * (uni(rng) + 1.0);
    ComplexVector u = ComplexVector::Zero(g.n_points);
    const double x0 = 5.0 * uni(rng), w = 1.0 + uni(rng) * 0.5;
    const std::complex<double> amp(0.8 * uni(rng), 0.8 * uni(rng));
    for (int i = 0; i < g.n_points; ++i) u[i] = amp * std::exp(-std::pow((g.points[i] - x0) / w, 2));
    const double sigma0 = 1.0 + uni(rng);
    const RealVector src = saturable_source(u, sigma0);
    const RealVector m = solve_screened_poisson(g, src, d);
    poisson_err = std::max(poisson_err, (m - oracle::convolve("exponential", std::sqrt(d), g, src))
                                            .cwiseAbs()
                                            .maxCoeff());
  }
  o.require("screened Poisson vs exponential-kernel convolution (5 sources) " + sci(poisson_err) +
                " <= 1e-6",
            poisson_err <= 1e-6);
  return o;
}

// --- 12 -----------------------------------------------------------------------

int count_at(const NlsModel& model, const StationaryState& st) {
  return solve_bdg(build_bdg(model, st)).unstable_count;
}

// Re-traces the branch around states[index - 1] .. states[index] with fine
// steps so events sharing one coarse step are separated.
Branch fine_trace(const NlsModel& model, const Branch& b, int index, const ContinuationOptions& base) {
  const int from = std::max(0, index - 2);
  ContinuationOptions o = base;
  o.ds_initial = 1e-3;
  o.ds_max = 2e-3;
  o.ds_min = 1e-5;
  o.max_steps = 160;
  o.mu_min = -10.0;
  o.mu_max = 10.0;
  const int n = model.grid().n_points;
  const auto& a = b.states[std::max(0, from - 1)];
  const auto& c = b.states[from + 1];
  RealVector dir(n + 1);
  dir.head(n) = c.psi - a.psi;
  dir[n] = c.mu - a.mu;
  return continue_branch(model, b.states[from], o, dir);
}

struct EventCheck {
  int pitchforks = 0, pitchforks_changing = 0;
  int folds = 0, folds_changing = 0;
  int other_changes = 0;
  std::string failures;
};

void check_branch(const NlsModel& model, const Branch& b, bool parent, const ContinuationOptions& opt,
                  EventCheck& ec) {
  auto count_bracket = [&](const Branch& br, const BranchEvent& e) {
    return std::pair{count_at(model, br.states[e.index - 1]), count_at(model, br.states[e.index])};
  };
  std::set<int> event_steps;
  for (const auto& e : b.events) {
    event_steps.insert(e.index);
    if (e.type == EventType::merge) continue;
    if (e.type == EventType::pitchfork && (!parent || e.partner_overlap < 0.5)) continue;
    int shared = 0;
    for (const auto& f : b.events) shared += f.index == e.index && f.type != EventType::merge;
    std::pair<int, int> counts;
    if (shared > 1) {
      // separate the coincident events on a finer trace
      const Branch fine = fine_trace(model, b, e.index, opt);
      const BranchEvent* match = nullptr;
      for (const auto& f : fine.events) {
        if (f.type == e.type && std::abs(f.mu - e.mu) < 1e-4) match = &f;
      }
      if (!match) {
        ec.failures += " event at mu " + Outcome::fmt(e.mu) + " not recovered on the fine trace;";
        if (e.type == EventType::fold) ++ec.folds, ++ec.folds_changing;
        if (e.type == EventType::pitchfork) ++ec.pitchforks;
        continue;
      }
      counts = count_bracket(fine, *match);
    } else {
      counts = count_bracket(b, e);
    }
    if (e.type == EventType::fold) {
      ++ec.folds;
      if (counts.first != counts.second) {
        ++ec.folds_changing;
        ec.failures += " fold at mu " + Outcome::fmt(e.mu) + " changes count;";
      }
    } else {
      ++ec.pitchforks;
      if (counts.first != counts.second) {
        ++ec.pitchforks_changing;
      } else {
        ec.failures += " pitchfork at mu " + Outcome::fmt(e.mu) + " without count change;";
      }
    }
  }
  int prev = -1;
  for (std::size_t k = 0; k < b.states.size(); ++k) {
    const int n = count_at(model, b.states[k]);
    if (k > 0 && n != prev && !event_steps.count(static_cast<int>(k))) ++ec.other_changes;
    prev = n;
  }
}

Outcome pitchfork_consistency() {
  Outcome o;
  // reduction: lambda^2 zeros of the parents against asymmetric existence ends
  double worst = 0.0;
  int matched = 0;
  bool all_found = true;
  for (double sigma : {0.1, 1.0}) {
    Workbench& wb = bench(sigma);
    const ModeParams& p = wb.mode_params();
    const auto zc = zero_crossings(
        [&](double n) { return parent_lambda_sq(p, FixedPointFamily::antisymmetric, n); }, 6.0, 600);
    const double lo = wb.measure("twomode.asymmetric_N_min");
    const double hi = wb.measure("twomode.asymmetric_N_max");
    all_found = all_found && zc.size() == 2 && std::isfinite(lo) && std::isfinite(hi);
    if (zc.size() == 2) {
      worst = std::max({worst, std::abs(zc[0] - lo), std::abs(zc[1] - hi)});
      matched += 2;
    }
    // symmetric side: g < 0 beyond N1cr
    const auto zs = zero_crossings(
        [&](double n) { return parent_lambda_sq(p, FixedPointFamily::symmetric, n); }, 6.0, 600);
    const auto ends = zero_crossings(
        [&](double n) {
          ModeParams q = p;
          q.N = n;
          const double g = q.coupling();
          return g < 0.0 && asymmetric_z_squared(q) > 0.0 ? 1.0 : -1.0;
        },
        6.0, 600);
    all_found = all_found && zs.size() == ends.size() && !zs.empty();
    for (std::size_t k = 0; k < std::min(zs.size(), ends.size()); ++k) {
      worst = std::max(worst, std::abs(zs[k] - ends[k]));
      ++matched;
    }
  }
  o.require("reduction: " + std::to_string(matched) + " lambda^2 zeros match existence ends, max gap " +
                sci(worst) + " <= 1e-8",
            all_found && worst <= 1e-8);

  EventCheck ec;
  struct Case {
    double sigma;
    int s, d;
    SymmetryClass parity;
  };
  for (const Case c : {Case{0.1, 1, -1, SymmetryClass::antisymmetric},
                       Case{0.1, 1, -1, SymmetryClass::symmetric},
                       Case{1.0, 1, -1, SymmetryClass::antisymmetric},
                       Case{1.0, -1, 1, SymmetryClass::symmetric}}) {
    Workbench& wb = bench(c.sigma, c.s, c.d);
    const BranchFamily& f = wb.family(c.parity);
    const auto opt = wb.config().continuation_options();
    check_branch(wb.scenario().model, f.parent, true, opt, ec);
    for (const auto& d : f.daughters) check_branch(wb.scenario().model, d, false, opt, ec);
  }
  o.require("PDE: " + std::to_string(ec.pitchforks_changing) + "/" + std::to_string(ec.pitchforks) +
                " symmetry-breaking pitchforks change the unstable count",
            ec.pitchforks > 0 && ec.pitchforks_changing == ec.pitchforks);
  o.require("PDE: " + std::to_string(ec.folds_changing) + "/" + std::to_string(ec.folds) +
                " folds change the unstable count",
            ec.folds > 0 && ec.folds_changing == 0);
  o.note(std::to_string(ec.other_changes) +
         " count changes away from any event (not gated)");
  if (!ec.failures.empty()) o.note("failures:" + ec.failures);
  return o;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "linear spectrum", linear_spectrum},
      {2, "regime thresholds", regime_thresholds},
      {3, "two-mode critical norms", critical_norms_check},
      {4, "two-mode stability windows at sigma=0.1", two_mode_windows},
      {5, "PDE bifurcations, (s,delta)=(1,-1)", pde_bifurcations},
      {6, "PDE bifurcations, (s,delta)=(-1,1), sigma=1", focusing_bifurcations},
      {7, "reduction predictions", reduction_predictions},
      {8, "dynamics: onset of asymmetry", dynamics_onset},
      {9, "norm and Hamiltonian conservation", conservation},
      {10, "BdG quartets and phase zero mode", bdg_structure},
      {11, "oracle equivalence", oracle_equivalence},
      {12, "pitchfork consistency", pitchfork_consistency},
      {13, "linear growth-rate match", growth_rate_match},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion K]\n", argv[0]);
      return 2;
    }
  }
  bool all_pass = true;
  bool ran = false;
  for (const auto& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    ran = true;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("CRITERION %d %s: %s | %s | %.1fs\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  if (!ran) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return all_pass ? 0 : 1;
}
