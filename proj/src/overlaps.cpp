#include "cqdw/overlaps.hpp"

#include <cmath>
#include <functional>

namespace cqdw {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::case1_eta0_eta4: return "case1_eta0_eta4";
    case Regime::case2_eta0_eta1_eta4: return "case2_eta0_eta1_eta4";
    case Regime::case3_eta0_eta1: return "case3_eta0_eta1";
  }
  return "unknown";
}

std::pair<RealVector, RealVector> overlap_integrand(int index, const RealVector& left,
                                                    const RealVector& right) {
  const RealVector l2 = left.cwiseProduct(left);
  const RealVector r2 = right.cwiseProduct(right);
  const RealVector lr = left.cwiseProduct(right);
  const RealVector l4 = l2.cwiseProduct(l2);
  const RealVector l2r2 = l2.cwiseProduct(r2);
  const RealVector l3r = l2.cwiseProduct(lr);
  switch (index) {
    case 0: return {l2, l2};
    case 1: return {l2, r2};
    case 2: return {l2, lr};
    case 3: return {lr, lr};
    case 4: return {l4, l2};
    case 5: return {l4, r2};
    case 6: return {l4, lr};
    case 7: return {l2r2, l2};
    case 8: return {l2r2, lr};
    case 9: return {l3r, l2};
    case 10: return {l3r, r2};
    case 11: return {l3r, lr};
    default: break;
  }
  throw InvalidArgument("overlap_integrand: index must be in [0, 11]");
}

OverlapSet compute_overlaps(const Grid& grid, const LinearBasis& basis, const Kernel& cubic,
                            const Kernel& quintic,
                            const std::optional<RegimeThresholds>& thresholds) {
  if (basis.phi_left.size() != grid.n_points) {
    throw InvalidArgument("compute_overlaps: basis and grid differ");
  }
  const Convolver conv_cubic(grid, cubic);
  const Convolver conv_quintic(grid, quintic);

  OverlapSet set;
  set.sigma = cubic.range;
  set.kernel_family = cubic.family;
  for (int i = 0; i < 12; ++i) {
    const auto [f, g] = overlap_integrand(i, basis.phi_left, basis.phi_right);
    const Convolver& conv = i < 4 ? conv_cubic : conv_quintic;
    set.eta[i] = inner(grid, g, conv.apply(f));
  }
  set.regime = thresholds ? classify_regime(set.sigma, *thresholds) : Regime::case1_eta0_eta4;
  return set;
}

double eta_rel(const OverlapSet& set, EtaCriterion which) {
  const double lead = which == EtaCriterion::eta1 ? set.eta[1] : set.eta[4];
  return lead - std::max(std::abs(set.eta[2]), std::abs(set.eta[3]));
}

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm >= 0.0) == (flo >= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RegimeThresholds compute_thresholds(const Grid& grid, const LinearBasis& basis,
                                    KernelFamily family, double level, double tolerance) {
  if (family == KernelFamily::delta) {
    throw InvalidArgument("compute_thresholds: delta kernel has no range");
  }
  auto criterion = [&](EtaCriterion which) {
    return [&, which](double sigma) {
      const Kernel k{family, sigma};
      return eta_rel(compute_overlaps(grid, basis, k, k), which) - level;
    };
  };
  const auto f1 = criterion(EtaCriterion::eta1);
  const auto f4 = criterion(EtaCriterion::eta4);

  // geometric sweep from near-local to very wide ranges
  const double sweep_lo = 0.05;
  const double sweep_hi = grid.x_max;
  const double ratio = 1.25;

  RegimeThresholds t;
  t.kernel_family = family;
  bool found_b = false;
  bool found_c = false;
  double prev = sweep_lo;
  double prev1 = f1(prev);
  double prev4 = f4(prev);
  for (double s = sweep_lo * ratio; s <= sweep_hi && !(found_b && found_c); s *= ratio) {
    const double v1 = f1(s);
    const double v4 = f4(s);
    if (!found_b && prev1 < 0.0 && v1 >= 0.0) {
      t.sigma_b = bisect(f1, prev, s, tolerance);
      found_b = true;
    }
    if (!found_c && prev4 >= 0.0 && v4 < 0.0) {
      t.sigma_c = bisect(f4, prev, s, tolerance);
      found_c = true;
    }
    prev = s;
    prev1 = v1;
    prev4 = v4;
  }
  if (!found_b || !found_c) {
    throw InvalidArgument("compute_thresholds: criterion crossing not found in sweep range");
  }
  return t;
}

Regime classify_regime(double sigma, const RegimeThresholds& thresholds) {
  if (!(sigma > 0.0)) throw InvalidArgument("classify_regime: sigma must be positive");
  if (sigma < thresholds.sigma_b) return Regime::case1_eta0_eta4;
  if (sigma < thresholds.sigma_c) return Regime::case2_eta0_eta1_eta4;
  return Regime::case3_eta0_eta1;
}

}  // namespace cqdw
