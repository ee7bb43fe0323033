#pragma once

#include "cqdw/grid.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace cqdw {

enum class KernelFamily { gaussian, exponential, delta };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

/// Nonlocal response function R(x) of unit mass, or the local (delta) limit.
struct Kernel {
  KernelFamily family = KernelFamily::gaussian;
  double range = 1.0;  // sigma; unused for delta

  static Kernel gaussian(double sigma) { return {KernelFamily::gaussian, sigma}; }
  static Kernel exponential(double sigma) { return {KernelFamily::exponential, sigma}; }
  static Kernel delta() { return {KernelFamily::delta, 0.0}; }

  bool is_delta() const { return family == KernelFamily::delta; }
  void validate() const;
};

/// Gaussian: exp(-x^2/s^2) / (s sqrt(pi)); exponential: exp(-|x|/s) / (2 s).
double kernel_eval(const Kernel& k, double x);

/// sum_m h R(m h) over the infinite lattice of spacing h. Equals 1 up to
/// aliasing (Gaussian) or O(h^2) kink error (exponential).
double lattice_mass(const Kernel& k, double spacing);

/// Quadrature weight applied to f(x') at lattice offset x - x' = m h:
/// h R(m h) / lattice_mass. The weights of every family sum to exactly one
/// over the lattice, so the delta limit is recovered as sigma -> 0.
double lattice_weight(const Kernel& k, double spacing, long offset);

/// Discrete linear convolution (K * f)_i = sum_j K_{i-j} tau_j f_j on a fixed
/// grid, with tau the trapezoid end-point factors and zero padding outside
/// the grid. FFT based; immutable and safe to share between threads.
class Convolver {
 public:
  Convolver(const Grid& grid, const Kernel& kernel);

  const Kernel& kernel() const { return kernel_; }
  int size() const { return n_; }

  RealVector apply(const RealVector& f) const;
  /// Dense Toeplitz matrix M with (M f)_i = sum_j M_ij f_j for fields whose
  /// end samples vanish (trapezoid end factors are not folded in).
  Eigen::MatrixXd dense() const;

 private:
  struct Plan;
  Kernel kernel_;
  int n_ = 0;
  double spacing_ = 0.0;
  std::shared_ptr<const Plan> plan_;
};

/// Convenience wrapper; builds a Convolver for a single application.
RealVector convolve(const Kernel& k, const Grid& grid, const RealVector& f);

}  // namespace cqdw
