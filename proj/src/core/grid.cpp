#include "fkwc/grid.hpp"

#include <cmath>
#include <sstream>

#include "fkwc/error.hpp"

namespace fkwc {

Grid::Grid(std::size_t m) {
  if (m < 3) {
    throw ParameterError("grid needs at least 3 points, got " + std::to_string(m));
  }
  const double denom = static_cast<double>(m - 1);
  step_ = 1.0 / denom;
  points_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    points_[i] = static_cast<double>(i) / denom;
  }
  weights_.assign(m, step_);
  weights_.front() = 0.5 * step_;
  weights_.back() = 0.5 * step_;
}

Grid Grid::from_points(std::span<const double> points, double tolerance) {
  if (points.size() < 3) {
    throw InputError("grid needs at least 3 points, got " + std::to_string(points.size()));
  }
  Grid grid(points.size());
  const double slack = tolerance * grid.step();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]) || std::abs(points[i] - grid.points_[i]) > slack) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "grid point " << i << " is " << points[i] << " but an equispaced grid on [0,1] with "
          << points.size() << " points expects " << grid.points_[i];
      if (i > 0 && points[i] <= points[i - 1]) {
        msg << " (points must be strictly increasing)";
      }
      throw InputError(msg.str());
    }
  }
  return grid;
}

namespace {

void require_on_grid(std::size_t n, const Grid& grid, const char* what) {
  if (n != grid.size()) {
    throw DimensionError(std::string(what) + " has " + std::to_string(n) +
                         " values but the grid has " + std::to_string(grid.size()) + " points");
  }
}

}  // namespace

double inner_product(std::span<const double> f, std::span<const double> g, const Grid& grid) {
  require_on_grid(f.size(), grid, "first curve");
  require_on_grid(g.size(), grid, "second curve");
  const auto w = grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    sum += w[i] * (f[i] * g[i]);
  }
  return sum;
}

double l2_norm(std::span<const double> f, const Grid& grid) {
  return std::sqrt(inner_product(f, f, grid));
}

double l2_distance_squared(std::span<const double> f, std::span<const double> g,
                           const Grid& grid) {
  require_on_grid(f.size(), grid, "first curve");
  require_on_grid(g.size(), grid, "second curve");
  const auto w = grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - g[i];
    sum += w[i] * (d * d);
  }
  return sum;
}

Curve differentiate(std::span<const double> f, const Grid& grid) {
  require_on_grid(f.size(), grid, "curve");
  const std::size_t m = f.size();
  const double inv2h = 1.0 / (2.0 * grid.step());
  Curve d(m);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    d[i] = (f[i + 1] - f[i - 1]) * inv2h;
  }
  d[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) * inv2h;
  return d;
}

}  // namespace fkwc
