#include <algorithm>

#include "fkwc/depth_kernels.hpp"
#include "fkwc/error.hpp"
#include "fkwc/parallel.hpp"

namespace fkwc::kernels {

namespace {

double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

// 0 for angles in [0, pi), 1 for [pi, 2pi).
int half_of(Point2 a) { return (a.y < 0.0 || (a.y == 0.0 && a.x < 0.0)) ? 1 : 0; }

bool angle_less(Point2 a, Point2 b) {
  const int ha = half_of(a);
  const int hb = half_of(b);
  if (ha != hb) return ha < hb;
  return cross(a, b) > 0.0;
}

// b lies at angle [0, pi) counter-clockwise from a.
bool within_half_turn(Point2 a, Point2 b) {
  const double c = cross(a, b);
  return c > 0.0 || (c == 0.0 && dot(a, b) > 0.0);
}

}  // namespace

std::size_t halfspace_count(Point2 query, std::span<const Point2> sample) {
  std::vector<Point2> dirs;
  dirs.reserve(sample.size());
  std::size_t coincident = 0;
  for (const Point2& p : sample) {
    const Point2 d{p.x - query.x, p.y - query.y};
    if (d.x == 0.0 && d.y == 0.0) {
      ++coincident;
    } else {
      dirs.push_back(d);
    }
  }
  const std::size_t n = dirs.size();
  if (n == 0) return coincident;
  std::sort(dirs.begin(), dirs.end(), angle_less);

  // The emptiest closed half-plane is the complement of the fullest open one;
  // the fullest open half-plane holds the points in [angle_i, angle_i + pi)
  // for some i.
  std::size_t fullest_open = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    j = std::max(j, i + 1);
    while (j < i + n && within_half_turn(dirs[i], dirs[j % n])) ++j;
    fullest_open = std::max(fullest_open, j - i);
  }
  return coincident + n - fullest_open;
}

std::size_t halfspace_count(double query, std::span<const double> sorted_sample) {
  const auto below_or_equal = static_cast<std::size_t>(
      std::upper_bound(sorted_sample.begin(), sorted_sample.end(), query) - sorted_sample.begin());
  const auto strictly_below = static_cast<std::size_t>(
      std::lower_bound(sorted_sample.begin(), sorted_sample.end(), query) - sorted_sample.begin());
  return std::min(below_or_equal, sorted_sample.size() - strictly_below);
}

namespace {

void require_compatible(const CurveMatrix& a, const CurveMatrix& b, const Grid& grid) {
  if (a.cols() != b.cols() || static_cast<std::size_t>(a.cols()) != grid.size()) {
    throw DimensionError("query and reference curves must share the grid");
  }
  if (b.rows() == 0) throw ParameterError("reference sample is empty");
}

}  // namespace

std::vector<double> integrated_halfspace(const CurveMatrix& queries, const CurveMatrix& reference,
                                         const Grid& grid) {
  require_compatible(queries, reference, grid);
  const auto n = static_cast<double>(reference.rows());
  const auto w = grid.weights();
  const auto m = static_cast<std::size_t>(grid.size());
  // Per grid point contributions, accumulated afterwards in grid order.
  std::vector<std::vector<double>> per_point(m, std::vector<double>(static_cast<std::size_t>(queries.rows())));
  parallel_for(m, [&](std::size_t t) {
    std::vector<double> column(reference.col(static_cast<Eigen::Index>(t)).begin(),
                               reference.col(static_cast<Eigen::Index>(t)).end());
    std::sort(column.begin(), column.end());
    for (Eigen::Index i = 0; i < queries.rows(); ++i) {
      per_point[t][static_cast<std::size_t>(i)] =
          static_cast<double>(halfspace_count(queries(i, static_cast<Eigen::Index>(t)), column)) / n;
    }
  });
  std::vector<double> out(static_cast<std::size_t>(queries.rows()), 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[t] * per_point[t][i];
  }
  return out;
}

std::vector<double> integrated_halfspace_bivariate(const CurveMatrix& queries,
                                                   const CurveMatrix& query_derivs,
                                                   const CurveMatrix& reference,
                                                   const CurveMatrix& reference_derivs,
                                                   const Grid& grid) {
  require_compatible(queries, reference, grid);
  require_compatible(query_derivs, reference_derivs, grid);
  if (query_derivs.rows() != queries.rows() || reference_derivs.rows() != reference.rows()) {
    throw DimensionError("derivative channel must have one row per curve");
  }
  const auto n = static_cast<double>(reference.rows());
  const auto w = grid.weights();
  const auto m = grid.size();
  std::vector<std::vector<double>> per_point(m, std::vector<double>(static_cast<std::size_t>(queries.rows())));
  parallel_for(m, [&](std::size_t t) {
    const auto tt = static_cast<Eigen::Index>(t);
    std::vector<Point2> cloud(static_cast<std::size_t>(reference.rows()));
    for (Eigen::Index j = 0; j < reference.rows(); ++j) {
      cloud[static_cast<std::size_t>(j)] = {reference(j, tt), reference_derivs(j, tt)};
    }
    for (Eigen::Index i = 0; i < queries.rows(); ++i) {
      const Point2 q{queries(i, tt), query_derivs(i, tt)};
      per_point[t][static_cast<std::size_t>(i)] = static_cast<double>(halfspace_count(q, cloud)) / n;
    }
  });
  std::vector<double> out(static_cast<std::size_t>(queries.rows()), 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[t] * per_point[t][i];
  }
  return out;
}

}  // namespace fkwc::kernels
