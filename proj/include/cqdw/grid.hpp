#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace cqdw {

using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Raised when a value violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform grid on [-x_max, x_max] including both end points.
///
/// Fields that obey homogeneous Dirichlet conditions are stored on all
/// n_points samples with the two end samples held at zero; discrete
/// operators act on the n_points - 2 interior samples.
struct Grid {
  int n_points = 0;
  double spacing = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  RealVector points;

  int interior_size() const { return n_points - 2; }
  int center_index() const { return n_points / 2; }
  /// Trapezoid weight of sample i.
  double weight(int i) const {
    return (i == 0 || i == n_points - 1) ? 0.5 * spacing : spacing;
  }
  RealVector weights() const;
  bool same_as(const Grid& other) const;
};

Grid build_grid(double half_width, double spacing);

struct PotentialParams {
  double trap_strength = 0.1;   // Omega-hat
  double barrier_height = 1.0;  // V0
  double barrier_width = 0.5;   // w

  void validate() const;
};

/// (1/2) trap^2 x^2 + V0 sech^2(x / w)
double potential_eval(const PotentialParams& params, double x);
RealVector potential_on_grid(const Grid& grid, const PotentialParams& params);

/// Field sampled on a grid.
struct GridFunction {
  Grid grid;
  ComplexVector values;

  GridFunction(Grid g, ComplexVector v);
  GridFunction(Grid g, const RealVector& v);
};

double integrate(const Grid& grid, const RealVector& f);
double inner(const Grid& grid, const RealVector& a, const RealVector& b);
std::complex<double> inner(const Grid& grid, const RealVector& a, const ComplexVector& b);
double norm_squared(const Grid& grid, const RealVector& f);
double norm_squared(const Grid& grid, const ComplexVector& f);

/// f(x) -> f(-x) on a symmetric grid.
RealVector reflect(const RealVector& f);
ComplexVector reflect(const ComplexVector& f);

/// Discrete L2 mass on x < 0 (half weight for the center sample).
double left_mass(const Grid& grid, const RealVector& density);

/// Population imbalance (N_left - N_right) / N of a density.
double density_imbalance(const Grid& grid, const RealVector& density);

}  // namespace cqdw
