#include "cqdw/grid.hpp"

#include <cmath>

namespace cqdw {

RealVector Grid::weights() const {
  RealVector w(n_points);
  for (int i = 0; i < n_points; ++i) w[i] = weight(i);
  return w;
}

bool Grid::same_as(const Grid& other) const {
  return n_points == other.n_points &&
         std::abs(spacing - other.spacing) <= 1e-14 * spacing &&
         std::abs(x_min - other.x_min) <= 1e-12 * std::max(1.0, std::abs(x_min));
}

Grid build_grid(double half_width, double spacing) {
  if (!(half_width > 0.0) || !(spacing > 0.0)) {
    throw InvalidArgument("build_grid: half_width and spacing must be positive");
  }
  const double ratio = half_width / spacing;
  const long cells = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(cells)) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("build_grid: half_width must be an integer multiple of spacing");
  }
  if (cells < 1) {
    throw InvalidArgument("build_grid: grid needs at least 3 points");
  }

  Grid g;
  g.n_points = static_cast<int>(2 * cells + 1);
  g.spacing = spacing;
  g.x_max = spacing * static_cast<double>(cells);
  g.x_min = -g.x_max;
  g.points.resize(g.n_points);
  // index from the center so the middle sample is exactly zero and the grid
  // is exactly mirror symmetric
  for (long i = -cells; i <= cells; ++i) {
    g.points[i + cells] = spacing * static_cast<double>(i);
  }
  return g;
}

void PotentialParams::validate() const {
  if (!(trap_strength > 0.0)) throw InvalidArgument("trap_strength must be positive");
  if (!(barrier_width > 0.0)) throw InvalidArgument("barrier_width must be positive");
}

double potential_eval(const PotentialParams& params, double x) {
  const double sech = 1.0 / std::cosh(x / params.barrier_width);
  return 0.5 * params.trap_strength * params.trap_strength * x * x +
         params.barrier_height * sech * sech;
}

RealVector potential_on_grid(const Grid& grid, const PotentialParams& params) {
  RealVector v(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) v[i] = potential_eval(params, grid.points[i]);
  return v;
}

GridFunction::GridFunction(Grid g, ComplexVector v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.n_points) {
    throw InvalidArgument("GridFunction: value count does not match grid");
  }
}

GridFunction::GridFunction(Grid g, const RealVector& v)
    : GridFunction(std::move(g), ComplexVector(v.cast<std::complex<double>>())) {}

double integrate(const Grid& grid, const RealVector& f) {
  double sum = 0.0;
  for (int i = 0; i < grid.n_points; ++i) sum += grid.weight(i) * f[i];
  return sum;
}

double inner(const Grid& grid, const RealVector& a, const RealVector& b) {
  return integrate(grid, a.cwiseProduct(b));
}

std::complex<double> inner(const Grid& grid, const RealVector& a, const ComplexVector& b) {
  std::complex<double> sum = 0.0;
  for (int i = 0; i < grid.n_points; ++i) sum += grid.weight(i) * a[i] * b[i];
  return sum;
}

double norm_squared(const Grid& grid, const RealVector& f) { return inner(grid, f, f); }

double norm_squared(const Grid& grid, const ComplexVector& f) {
  return integrate(grid, f.cwiseAbs2());
}

RealVector reflect(const RealVector& f) { return f.reverse(); }
ComplexVector reflect(const ComplexVector& f) { return f.reverse(); }

double left_mass(const Grid& grid, const RealVector& density) {
  const int c = grid.center_index();
  double sum = 0.0;
  for (int i = 0; i < c; ++i) sum += grid.weight(i) * density[i];
  return sum + 0.5 * grid.weight(c) * density[c];
}

double density_imbalance(const Grid& grid, const RealVector& density) {
  const double total = integrate(grid, density);
  if (total <= 0.0) return 0.0;
  const double left = left_mass(grid, density);
  return (2.0 * left - total) / total;
}

}  // namespace cqdw
