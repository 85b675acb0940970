#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fkwc {

/// A function sampled on a grid: one value per grid point.
using Curve = std::vector<double>;

/// Equispaced evaluation points on [0,1], endpoints included, shared by every
/// curve of a dataset. Also carries the trapezoid quadrature weights.
class Grid {
public:
  /// Uniform grid with `m` points; throws ParameterError when m < 3.
  explicit Grid(std::size_t m);

  /// Validates externally supplied points (e.g. a CSV header). They must
  /// start at 0, end at 1 and be equispaced within `tolerance` times the step.
  static Grid from_points(std::span<const double> points, double tolerance = 1e-9);

  std::size_t size() const noexcept { return points_.size(); }
  double step() const noexcept { return step_; }
  std::span<const double> points() const noexcept { return points_; }
  double point(std::size_t i) const { return points_.at(i); }

  /// Trapezoid weights; they sum to one.
  std::span<const double> weights() const noexcept { return weights_; }

  bool operator==(const Grid& other) const noexcept { return size() == other.size(); }

private:
  double step_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// Trapezoid approximation of the L2([0,1]) inner product.
double inner_product(std::span<const double> f, std::span<const double> g, const Grid& grid);

/// sqrt(inner_product(f, f)).
double l2_norm(std::span<const double> f, const Grid& grid);

/// Squared L2 distance between two curves, computed from their difference.
double l2_distance_squared(std::span<const double> f, std::span<const double> g,
                           const Grid& grid);

/// Second-order finite differences: central in the interior, one-sided
/// three-point stencils at the endpoints.
Curve differentiate(std::span<const double> f, const Grid& grid);

}  // namespace fkwc
