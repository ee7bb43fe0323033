#include "cqdw/presets.hpp"

#include "cqdw/io.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cqdw {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

RunConfig base(double sigma, int s = 1, int delta = -1) {
  RunConfig c;
  c.cubic.sigma = sigma;
  c.quintic.sigma = sigma;
  c.s = s;
  c.delta = delta;
  return c;
}

RunConfig exponential_base() {
  RunConfig c;
  c.cubic.family = "exponential";
  c.quintic.family = "exponential";
  return c;
}

RunConfig dynamics_base(double mu, double t_end) {
  RunConfig c = base(1.0);
  c.evolve_mu = mu;
  c.t_end = t_end;
  return c;
}

std::vector<ScenarioPreset> make_presets() {
  std::vector<ScenarioPreset> p;
  p.push_back({"basis", "linear modes u0, u1 and the rotated basis", "spectrum", base(1.0),
               {{"omega0", 0.13282, 5e-4, "reported linear eigenvalue"},
                {"omega1", 0.15571, 5e-4, "reported linear eigenvalue"}}});
  p.push_back({"overlaps-gaussian", "eta_0..eta_4 versus sigma, Gaussian kernel; regime thresholds",
               "overlaps", base(1.0),
               {{"sigma_b", 2.96, 0.05, "reported threshold, Gaussian kernel"},
                {"sigma_c", 9.15, 0.15, "reported threshold, Gaussian kernel"}}});
  p.push_back({"overlaps-exponential", "eta_4..eta_11 versus sigma, exponential kernel; regime thresholds",
               "overlaps", exponential_base(),
               {{"sigma_b", 1.56, 0.05, "reported threshold, exponential kernel"},
                {"sigma_c", 7.01, 0.15, "reported threshold, exponential kernel"}}});
  p.push_back({"critical-norms", "critical norms N0..N3 versus sigma", "twomode", base(1.0),
               {{"twomode.N1cr", 4.9862, 1e-3, "reported N1cr at sigma = 1 (phase portrait caption)"},
                {"twomode.coalescence_sigma", 7.52, 0.1, "reported sigma where N2cr and N3cr meet"}}});
  p.push_back({"phase-portrait", "phase portrait at sigma = 1, N = 5", "twomode", base(1.0),
               {{"twomode.asymmetric_z", 0.4318, 1e-3, "reported asymmetric fixed points (+-0.4318, 0) at N = 5"}}});
  p.push_back({"lambda-sq-sigma01", "lambda^2 versus N at sigma = 0.1", "twomode", base(0.1),
               {{"twomode.N2cr", 0.14, 0.02, "reported lambda^2 sign change, antisymmetric branch"},
                {"twomode.N3cr", 4.63, 0.05, "reported lambda^2 sign change, antisymmetric branch"},
                {"twomode.asymmetric_N_min", 0.03, 0.01, "reported asymmetric branch end point N = 0.03"},
                {"twomode.asymmetric_N_max", 4.75, 0.05, "reported asymmetric branch end point N = 4.75"}}});
  p.push_back({"branches-sigma01", "stationary branches at sigma = 0.1, (s, delta) = (1, -1)", "continue",
               base(0.1),
               {{"pde.antisymmetric.ssb_mu", 0.1686, 0.002, "reported SSB at mu = 0.1686"},
                {"pde.antisymmetric.restore_mu", 0.381, 0.005, "reported merge at mu = 0.381"},
                {"pde.symmetric.ssb_mu", 0.359, 0.005, "reported symmetric pitchfork at mu = 0.359"},
                {"twomode.mu_N2cr", 0.1679, 1e-3, "reported two-mode prediction 0.1679"},
                {"twomode.mu_N3cr", 0.3723, 1e-3, "reported two-mode prediction 0.3723"},
                {"twomode.mu_N1cr", 0.3492, 1e-3, "reported two-mode prediction 0.3492"}}});
  p.push_back({"branches-sigma1", "stationary branches at sigma = 1, (s, delta) = (1, -1)", "continue",
               base(1.0),
               {{"pde.antisymmetric.ssb_mu", 0.168, 0.002, "reported SSB at mu = 0.168"},
                {"pde.antisymmetric.restore_mu", 0.374, 0.005, "reported merge at mu = 0.374"},
                {"pde.symmetric.ssb_mu", 0.355, 0.005, "reported symmetric pitchfork at mu = 0.355"},
                {"twomode.mu_N2cr", 0.1673, 1e-3, "reported two-mode prediction 0.1673"},
                {"twomode.mu_N3cr", 0.364, 1e-3, "reported two-mode prediction 0.364"},
                {"twomode.mu_N1cr", 0.342, 1e-3, "reported two-mode prediction 0.342"}}});
  p.push_back({"branches-sigma8", "stationary branches at sigma = 8, (s, delta) = (1, -1)", "continue",
               base(8.0),
               {{"pde.antisymmetric.ssb_mu", 0.195, 0.003, "reported SSB at mu = 0.195"},
                {"twomode.mu_N2cr", 0.1981, 1e-3, "reported two-mode prediction 0.1981"}}});
  p.push_back({"branches-focusing", "stationary branches at sigma = 1, (s, delta) = (-1, 1)", "continue",
               base(1.0, -1, 1),
               {{"pde.symmetric.ssb_mu", 0.1212, 0.002, "reported SSB at mu = 0.1212"},
                {"pde.symmetric.restore_mu", -0.0727, 0.003, "reported restoring at mu = -0.0727"},
                {"pde.antisymmetric.ssb_mu", -0.0465, 0.003, "reported antisymmetric event at mu = -0.0465"},
                {"twomode.mu_N2cr", 0.1212, 1e-3, "reported two-mode prediction 0.1212"},
                {"twomode.mu_N3cr", -0.0755, 1e-3, "reported two-mode prediction -0.0755"},
                {"twomode.mu_N1cr", -0.0526, 1e-3, "reported two-mode prediction -0.0526"}}});
  p.push_back({"evolution-mu019", "density evolution of the perturbed antisymmetric state, mu = 0.19",
               "evolve", dynamics_base(0.19, 300.0),
               {{"dynamics.onset_t", 225.0, 75.0, "reported onset, about t = 200"},
                {"dynamics.norm_drift", 0.0, 1e-8, "norm conservation of the integrator"}}});
  p.push_back({"evolution-mu025", "density evolution of the perturbed antisymmetric state, mu = 0.25",
               "evolve", dynamics_base(0.25, 150.0),
               {{"dynamics.onset_t", 110.0, 40.0, "reported onset, about t = 100"},
                {"dynamics.norm_drift", 0.0, 1e-8, "norm conservation of the integrator"}}});
  p.push_back({"phase-plane-mu019", "phase-plane trajectory of the mu = 0.19 run up to t = 1500", "evolve",
               dynamics_base(0.19, 1500.0),
               {{"dynamics.onset_t", 225.0, 75.0, "reported onset, about t = 200"},
                {"dynamics.norm_drift", 0.0, 1e-8, "norm conservation of the integrator"}}});
  {
    RunConfig c = base(0.1);
    c.branch = "antisymmetric";
    p.push_back({"sigma01-antisym", "antisymmetric branch at sigma = 0.1", "continue", c,
                 {{"pde.antisymmetric.ssb_mu", 0.1686, 0.002, "reported SSB at mu = 0.1686"}}});
  }
  {
    RunConfig c = base(1.0, -1, 1);
    c.branch = "symmetric";
    p.push_back({"sigma1-focusing", "symmetric branch at sigma = 1, (s, delta) = (-1, 1)",
                 "continue", c,
                 {{"pde.symmetric.ssb_mu", 0.1212, 0.002,
                   "reported symmetry breaking at mu = 0.1212"}}});
  }
  return p;
}

// name = prefix + "." + rest
bool split(const std::string& name, const std::string& prefix, std::string& rest) {
  if (name.rfind(prefix + ".", 0) != 0) return false;
  rest = name.substr(prefix.size() + 1);
  return true;
}

double critical(const CriticalNorms& cn, const std::string& label) {
  const std::optional<double>* v = nullptr;
  if (label == "N0cr") v = &cn.N0cr;
  if (label == "N1cr") v = &cn.N1cr;
  if (label == "N2cr") v = &cn.N2cr;
  if (label == "N3cr") v = &cn.N3cr;
  if (!v) throw UnknownQuantity("unknown critical norm '" + label + "'");
  return v->value_or(kMissing);
}

// End points of the N range with asymmetric fixed points on the side of
// `parent`, located by bisection on existence over a uniform scan.
std::pair<double, double> asymmetric_existence(const ModeParams& base_params,
                                               FixedPointFamily parent, double n_max,
                                               int samples) {
  auto exists = [&](double n) {
    ModeParams p = base_params;
    p.N = n;
    const double g = p.coupling();
    if (g == 0.0 || parent_for_coupling_sign(g) != parent) return false;
    return asymmetric_z_squared(p) > 0.0;
  };
  auto refine = [&](double lo, double hi) {
    const bool at_lo = exists(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (exists(mid) == at_lo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double first = kMissing, last = kMissing;
  double prev = n_max / samples;
  bool prev_in = exists(prev);
  for (int k = 2; k <= samples; ++k) {
    const double n = n_max * k / samples;
    const bool in = exists(n);
    if (in && !prev_in && std::isnan(first)) first = refine(prev, n);
    if (!in && prev_in) last = refine(prev, n);
    prev = n;
    prev_in = in;
  }
  return {first, last};
}

}  // namespace

const std::vector<ScenarioPreset>& builtin_presets() {
  static const std::vector<ScenarioPreset> presets = make_presets();
  return presets;
}

const ScenarioPreset& find_preset(const std::string& name) {
  for (const auto& p : builtin_presets()) {
    if (p.name == name) return p;
  }
  throw InvalidArgument("unknown preset '" + name + "'");
}

Workbench::Workbench(RunConfig config) : config_(std::move(config)) { config_.validate(); }

const Scenario& Workbench::scenario() {
  if (!scenario_) scenario_ = std::make_unique<Scenario>(make_scenario(config_));
  return *scenario_;
}

const std::optional<RegimeThresholds>& Workbench::thresholds() {
  if (!thresholds_) thresholds_ = regime_thresholds(scenario());
  return *thresholds_;
}

RegimeThresholds Workbench::thresholds_for(KernelFamily family) {
  auto it = by_family_.find(family);
  if (it != by_family_.end()) return it->second;
  const auto& own = thresholds();
  RegimeThresholds t = own && own->kernel_family == family
                           ? *own
                           : compute_thresholds(scenario().model.grid(), scenario().basis, family);
  by_family_.emplace(family, t);
  return t;
}

const ModeParams& Workbench::mode_params() {
  if (!mode_params_) {
    mode_params_ = mode_params_at(scenario(), config_.cubic_kernel().range, thresholds());
  }
  return *mode_params_;
}

const BranchFamily& Workbench::family(SymmetryClass parity) {
  auto it = families_.find(parity);
  if (it == families_.end()) {
    it = families_.emplace(parity, trace_family(scenario(), parity, config_.follow_daughters)).first;
  }
  return it->second;
}

const StationaryState& Workbench::evolution_state() {
  if (!evolution_state_) {
    evolution_state_ =
        parity_state_at(scenario(), branch_family(config_.evolve_branch), config_.evolve_mu);
  }
  return *evolution_state_;
}

const EvolutionRun& Workbench::evolution() {
  if (!evolution_) {
    const StationaryState& st = evolution_state();
    const Parity parity = st.symmetry == SymmetryClass::symmetric ? Parity::even : Parity::odd;
    EvolutionOptions opt = config_.evolution_options();
    evolution_ = evolve(scenario().model, perturbed_initial(scenario(), st), st.mu, config_.t_end,
                        opt, parity);
  }
  return *evolution_;
}

double Workbench::measure(const std::string& q) {
  std::string rest;
  if (q == "omega0") return scenario().basis.omega0;
  if (q == "omega1") return scenario().basis.omega1;
  if (q == "sigma_b" || q == "sigma_c") {
    const auto& t = thresholds();
    if (!t) return kMissing;
    return q == "sigma_b" ? t->sigma_b : t->sigma_c;
  }
  if (split(q, "sigma_b", rest)) return thresholds_for(kernel_family_from_string(rest)).sigma_b;
  if (split(q, "sigma_c", rest)) return thresholds_for(kernel_family_from_string(rest)).sigma_c;
  if (split(q, "twomode", rest)) {
    const ModeParams& p = mode_params();
    if (rest.rfind("mu_", 0) == 0) {
      const std::string label = rest.substr(3);
      for (const auto& e : predicted_bifurcations(p)) {
        if (e.label == label) return e.mu;
      }
      critical(critical_norms(p), label);  // validates the label
      return kMissing;
    }
    if (rest == "asymmetric_z") {
      ModeParams at = p;
      at.N = config_.twomode_norm;
      const auto pts = asymmetric_z(at);
      return pts.empty() ? kMissing : std::abs(pts.front().z);
    }
    if (rest == "asymmetric_N_min" || rest == "asymmetric_N_max") {
      // the antisymmetric parent side: coupling g > 0
      const auto [lo, hi] = asymmetric_existence(p, FixedPointFamily::antisymmetric,
                                                 config_.twomode_norm_max,
                                                 config_.twomode_samples);
      return rest == "asymmetric_N_min" ? lo : hi;
    }
    if (rest == "coalescence_sigma") {
      return coalescence_sigma(scenario(), thresholds(), 0.1, 20.0).value_or(kMissing);
    }
    return critical(critical_norms(p), rest);
  }
  if (split(q, "pde", rest)) {
    const auto dot = rest.find('.');
    if (dot == std::string::npos) throw UnknownQuantity("unknown quantity '" + q + "'");
    const SymmetryClass parity = branch_family(rest.substr(0, dot));
    const std::string what = rest.substr(dot + 1);
    if (what != "ssb_mu" && what != "restore_mu" && what != "fold_mu") {
      throw UnknownQuantity("unknown quantity '" + q + "'");
    }
    const BranchFamily& f = family(parity);
    if (what == "ssb_mu") {
      const auto ev = symmetry_breaking_events(f.parent);
      return ev.empty() ? kMissing : ev.front().mu;
    }
    if (what == "fold_mu") {
      const auto ev = events_of(f.parent, EventType::fold);
      return ev.empty() ? kMissing : ev.front().mu;
    }
    if (f.daughters.empty()) return kMissing;
    const auto merges = events_of(f.daughters.front(), EventType::merge);
    return merges.empty() ? kMissing : merges.front().mu;
  }
  if (split(q, "dynamics", rest)) {
    if (rest == "onset_t") return asymmetry_onset(evolution()).value_or(kMissing);
    if (rest == "norm_drift") return evolution().max_norm_drift;
    if (rest == "bdg_rate") {
      const auto spec = solve_bdg(build_bdg(scenario().model, evolution_state()));
      return std::max(spec.max_real_part, 0.0);
    }
    if (rest == "growth_rate") return fit_growth(evolution(), 0.0, 0.1).rate;
  }
  throw UnknownQuantity("unknown quantity '" + q + "'");
}

std::vector<std::string> quantity_names() {
  return {"omega0",
          "omega1",
          "sigma_b",
          "sigma_c",
          "sigma_b.<gaussian|exponential>",
          "sigma_c.<gaussian|exponential>",
          "twomode.<N0cr|N1cr|N2cr|N3cr>",
          "twomode.mu_<N0cr|N1cr|N2cr|N3cr>",
          "twomode.asymmetric_z",
          "twomode.asymmetric_N_min",
          "twomode.asymmetric_N_max",
          "twomode.coalescence_sigma",
          "pde.<symmetric|antisymmetric>.ssb_mu",
          "pde.<symmetric|antisymmetric>.restore_mu",
          "pde.<symmetric|antisymmetric>.fold_mu",
          "dynamics.onset_t",
          "dynamics.norm_drift",
          "dynamics.bdg_rate",
          "dynamics.growth_rate"};
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::error: return "ERROR";
  }
  return "?";
}

RegressionReport regress(const ScenarioPreset& preset, Workbench& bench) {
  RegressionReport r;
  r.preset = preset.name;
  if (preset.expected.empty()) {
    r.warnings.push_back("preset '" + preset.name + "' has no expectations; vacuous PASS");
  }
  for (const auto& e : preset.expected) {
    CheckRow row;
    row.expected = e;
    try {
      row.measured = bench.measure(e.quantity);
      if (std::isnan(row.measured)) {
        row.status = CheckStatus::fail;
        row.detail = "quantity not present";
      } else {
        row.status = std::abs(row.measured - e.value) <= e.tolerance ? CheckStatus::pass
                                                                      : CheckStatus::fail;
      }
    } catch (const std::exception& ex) {
      row.status = CheckStatus::error;
      row.measured = kMissing;
      row.detail = ex.what();
    }
    if (row.status == CheckStatus::error) {
      r.overall = CheckStatus::error;
    } else if (row.status == CheckStatus::fail && r.overall == CheckStatus::pass) {
      r.overall = CheckStatus::fail;
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

RegressionReport regress(const ScenarioPreset& preset) {
  Workbench bench(preset.config);
  return regress(preset, bench);
}

std::string format_report(const RegressionReport& r) {
  std::ostringstream os;
  os << "preset " << r.preset << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  for (const auto& row : r.rows) {
    os << to_string(row.status) << "  " << row.expected.quantity << "  measured "
       << (std::isnan(row.measured) ? std::string("n/a") : io::fmt(row.measured)) << "  expected "
       << io::fmt(row.expected.value) << " +- " << io::fmt(row.expected.tolerance) << "  ["
       << row.expected.provenance << "]";
    if (!row.detail.empty()) os << "  (" << row.detail << ")";
    os << "\n";
  }
  os << "overall " << to_string(r.overall) << "\n";
  return os.str();
}

}  // namespace cqdw
