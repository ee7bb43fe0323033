#pragma once

#include "cqdw/kernel.hpp"
#include "cqdw/linear_spectrum.hpp"

#include <array>
#include <optional>
#include <string>

namespace cqdw {

/// Which overlap integrals the two-mode truncation keeps.
enum class Regime {
  case1_eta0_eta4,       // sigma < sigma_b
  case2_eta0_eta1_eta4,  // sigma_b <= sigma < sigma_c
  case3_eta0_eta1,       // sigma >= sigma_c; quintic self term dropped
};

std::string to_string(Regime r);

struct RegimeThresholds {
  double sigma_b = 0.0;
  double sigma_c = 0.0;
  KernelFamily kernel_family = KernelFamily::gaussian;
};

/// The twelve overlap integrals eta_0 ... eta_11.
///
/// Each is a double integral  int int R(x - x') f(x') g(x) dx' dx  with the
/// mode products below (L = phi_left, R = phi_right). eta_0..3 use the cubic
/// kernel, eta_4..11 the quintic kernel.
///
///   idx  f(x')      g(x)        idx  f(x')      g(x)
///    0   L^2        L^2          6   L^4        L R
///    1   L^2        R^2          7   L^2 R^2    L^2
///    2   L^2        L R          8   L^2 R^2    L R
///    3   L R        L R          9   L^3 R      L^2
///    4   L^4        L^2         10   L^3 R      R^2
///    5   L^4        R^2         11   L^3 R      L R
struct OverlapSet {
  std::array<double, 12> eta{};
  double sigma = 0.0;
  KernelFamily kernel_family = KernelFamily::gaussian;
  Regime regime = Regime::case1_eta0_eta4;
};

/// Mode products (f, g) for overlap index i, built from (left, right).
std::pair<RealVector, RealVector> overlap_integrand(int index, const RealVector& left,
                                                    const RealVector& right);

/// Computes all twelve integrals as quadrature(g * convolve(R, f)). The
/// regime is classified against `thresholds` when given, otherwise case 1.
OverlapSet compute_overlaps(const Grid& grid, const LinearBasis& basis, const Kernel& cubic,
                            const Kernel& quintic,
                            const std::optional<RegimeThresholds>& thresholds = std::nullopt);

enum class EtaCriterion { eta1, eta4 };

/// eta_1 (or eta_4) minus max(|eta_2|, |eta_3|).
double eta_rel(const OverlapSet& set, EtaCriterion which);

/// sigma_b: smallest sigma with eta_rel(eta1) >= level; sigma_c: the sigma at
/// which eta_rel(eta4) falls below level. Both kernels share sigma. Located
/// by bracketing on a geometric sweep and bisection to `tolerance`.
RegimeThresholds compute_thresholds(const Grid& grid, const LinearBasis& basis,
                                    KernelFamily family, double level = 0.01,
                                    double tolerance = 1e-5);

Regime classify_regime(double sigma, const RegimeThresholds& thresholds);

}  // namespace cqdw
