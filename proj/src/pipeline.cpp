#include "cqdw/pipeline.hpp"

#include <cmath>

namespace cqdw {

Scenario make_scenario(const RunConfig& config) {
  config.validate();
  ModelParams params = config.model_params();
  LinearBasis basis = compute_linear_basis(params.grid, params.potential);
  return Scenario{config, NlsModel(std::move(params)), std::move(basis)};
}

SymmetryClass branch_family(const std::string& name) {
  if (name == "symmetric") return SymmetryClass::symmetric;
  if (name == "antisymmetric") return SymmetryClass::antisymmetric;
  throw InvalidArgument("unknown parity branch '" + name + "'");
}

StationaryState parity_seed(const Scenario& sc, SymmetryClass family) {
  const bool sym = family == SymmetryClass::symmetric;
  return seed_from_linear_mode(sc.model, sym ? sc.basis.u0 : sc.basis.u1,
                               sym ? sc.basis.omega0 : sc.basis.omega1, 1e-3,
                               sc.config.newton_options());
}

std::vector<BranchEvent> events_of(const Branch& branch, EventType type) {
  std::vector<BranchEvent> out;
  for (const auto& e : branch.events) {
    if (e.type == type) out.push_back(e);
  }
  return out;
}

std::vector<BranchEvent> symmetry_breaking_events(const Branch& parent, double min_overlap) {
  std::vector<BranchEvent> out;
  for (const auto& e : events_of(parent, EventType::pitchfork)) {
    if (e.partner_overlap >= min_overlap) out.push_back(e);
  }
  return out;
}

BranchFamily trace_family(const Scenario& sc, SymmetryClass family, bool follow_daughters) {
  if (family == SymmetryClass::asymmetric) throw InvalidArgument("trace_family: need a parity branch");
  const ContinuationOptions opt = sc.config.continuation_options();
  BranchFamily out;
  out.parent = continue_branch(sc.model, parity_seed(sc, family), opt);
  set_partner_overlaps(sc.model, out.parent,
                       family == SymmetryClass::symmetric ? sc.basis.u1 : sc.basis.u0);
  if (!follow_daughters) return out;

  const int n = sc.model.grid().n_points;
  std::vector<BranchEvent> merges;
  for (const auto& pf : symmetry_breaking_events(out.parent)) {
    bool reached = false;
    for (const auto& m : merges) {
      reached = reached || (std::abs(m.mu - pf.mu) <= 1e-3 &&
                            std::abs(m.N - pf.N) <= 1e-2 * std::max(1.0, pf.N));
    }
    if (reached) continue;
    const StationaryState start = switch_branch(sc.model, pf, opt.newton);
    RealVector dir(n + 1);
    dir.head(n) = start.psi - pf.psi;
    dir[n] = start.mu - pf.mu;
    Branch d = continue_branch(sc.model, start, opt, dir);
    for (const auto& m : events_of(d, EventType::merge)) merges.push_back(m);
    out.daughters.push_back(std::move(d));
    out.daughter_origin_mu.push_back(pf.mu);
  }
  return out;
}

std::vector<int> unstable_counts(const NlsModel& model, const Branch& branch) {
  std::vector<int> out;
  out.reserve(branch.states.size());
  for (const auto& st : branch.states) {
    out.push_back(solve_bdg(build_bdg(model, st)).unstable_count);
  }
  return out;
}

StationaryState parity_state_at(const Scenario& sc, SymmetryClass family, double mu) {
  ContinuationOptions opt = sc.config.continuation_options();
  opt.detect_pitchforks = false;
  const StationaryState seed = parity_seed(sc, family);
  if (mu > seed.mu) {
    opt.mu_max = mu + 0.01;
  } else {
    opt.mu_min = mu - 0.01;
  }
  const Branch b = continue_branch(sc.model, seed, opt);
  return state_at_mu(sc.model, b, mu, opt.newton);
}

ComplexVector perturbed_initial(const Scenario& sc, const StationaryState& state) {
  const RunConfig& c = sc.config;
  const Grid& g = sc.model.grid();
  switch (c.perturbation) {
    case PerturbationKind::none:
      return state.psi.cast<std::complex<double>>();
    case PerturbationKind::random:
      return random_perturbation(g, state.psi, c.amplitude, c.seed);
    case PerturbationKind::eigenvector: {
      const auto mode = unstable_mode(build_bdg(sc.model, state));
      if (!mode) throw InvalidArgument("perturbed_initial: state has no unstable eigenvector");
      return directed_perturbation(g, state.psi, mode->perturbation, c.amplitude);
    }
  }
  return state.psi.cast<std::complex<double>>();
}

std::optional<RegimeThresholds> regime_thresholds(const Scenario& sc) {
  const Kernel k = sc.config.cubic_kernel();
  if (k.is_delta()) return std::nullopt;
  return compute_thresholds(sc.model.grid(), sc.basis, k.family);
}

ModeParams mode_params_at(const Scenario& sc, double sigma,
                          const std::optional<RegimeThresholds>& thresholds) {
  Kernel cubic = sc.config.cubic_kernel();
  Kernel quintic = sc.config.quintic_kernel();
  if (!cubic.is_delta()) cubic.range = sigma;
  if (!quintic.is_delta()) quintic.range = sigma;
  const OverlapSet set = compute_overlaps(sc.model.grid(), sc.basis, cubic, quintic, thresholds);
  return make_mode_params(set, sc.basis, sc.config.s, sc.config.delta);
}

std::optional<double> coalescence_sigma(const Scenario& sc,
                                        const std::optional<RegimeThresholds>& thresholds,
                                        double lo, double hi, double tolerance) {
  auto pair_exists = [&](double sigma) {
    const CriticalNorms cn = critical_norms(mode_params_at(sc, sigma, thresholds));
    return cn.N2cr.has_value() && cn.N3cr.has_value();
  };
  bool at_lo = pair_exists(lo);
  if (at_lo == pair_exists(hi)) return std::nullopt;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (pair_exists(mid) == at_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace cqdw
