#pragma once

// Query-versus-reference depth evaluation. Each function returns the depth of
// every row of `queries` with respect to the empirical distribution of the
// rows of `reference`. The dataset-level functions in depth.hpp call these
// with queries == reference.

#include <cstdint>
#include <span>
#include <vector>

#include "fkwc/dataset.hpp"

namespace fkwc::kernels {

struct Point2 {
  double x;
  double y;
};

/// Number of sample points in the emptiest closed half-plane whose boundary
/// passes through `query` (points equal to the query lie in every half-plane).
/// Exact angular sweep, O(n log n).
std::size_t halfspace_count(Point2 query, std::span<const Point2> sample);

/// min(#{s <= q}, #{s >= q}) for a sorted sample.
std::size_t halfspace_count(double query, std::span<const double> sorted_sample);

/// One L2-root channel: mean squared L2 distance to the reference rows.
std::vector<double> mean_squared_distance(const CurveMatrix& queries, const CurveMatrix& reference,
                                          const Grid& grid);

/// (1 + sum_k sqrt(msd_k) / channels)^-1 over the supplied channels.
std::vector<double> ltr_from_channels(const std::vector<std::vector<double>>& msd);

std::vector<double> spatial(const CurveMatrix& queries, const CurveMatrix& reference,
                            const Grid& grid);

/// Median of the pairwise squared distances between reference rows.
double median_squared_distance(const CurveMatrix& reference, const Grid& grid);

/// Kernelized spatial depth with gamma(x, z) = exp(-||x - z||^2 / sigma2).
std::vector<double> kernel_spatial(const CurveMatrix& queries, const CurveMatrix& reference,
                                   const Grid& grid, double sigma2);

/// Integrated univariate halfspace depth.
std::vector<double> integrated_halfspace(const CurveMatrix& queries, const CurveMatrix& reference,
                                         const Grid& grid);

/// Integrated bivariate halfspace depth of (curve, derivative) pairs.
std::vector<double> integrated_halfspace_bivariate(const CurveMatrix& queries,
                                                   const CurveMatrix& query_derivs,
                                                   const CurveMatrix& reference,
                                                   const CurveMatrix& reference_derivs,
                                                   const Grid& grid);

/// Modified band depth summed over band sizes 2..band_order.
std::vector<double> modified_band(const CurveMatrix& queries, const CurveMatrix& reference,
                                  const Grid& grid, std::size_t band_order);

/// Unit-norm directions: i.i.d. standard normals on the grid smoothed by a
/// 5-point moving average (window truncated at the ends). Direction k is
/// drawn from its own stream, so the first k directions do not depend on
/// how many are requested.
CurveMatrix random_directions(const Grid& grid, std::size_t count, std::uint64_t seed);

/// Pointwise median absolute deviation of the reference rows, falling back
/// to the pointwise standard deviation and then to 1 where it vanishes.
std::vector<double> pointwise_scale(const CurveMatrix& reference);

/// Divides each direction by the pointwise scale and renormalizes to unit norm.
CurveMatrix scale_directions(const CurveMatrix& directions, std::span<const double> scale,
                             const Grid& grid);

/// Random projection depth with the univariate depth F(z)(1 - F(z)) and the
/// mid-rank empirical CDF.
std::vector<double> random_projection(const CurveMatrix& queries, const CurveMatrix& reference,
                                      const CurveMatrix& directions, const Grid& grid);

/// Random projection depth on (curve, derivative) projection pairs using a
/// product-Gaussian kernel density value as the bivariate depth.
std::vector<double> random_projection_bivariate(const CurveMatrix& queries,
                                                const CurveMatrix& query_derivs,
                                                const CurveMatrix& reference,
                                                const CurveMatrix& reference_derivs,
                                                const CurveMatrix& directions, const Grid& grid);

/// Product-Gaussian KDE with per-coordinate Scott bandwidth n^(-1/6) * sd,
/// evaluated at each query pair. A coordinate with zero spread is dropped;
/// when both are degenerate every value is 1.
std::vector<double> bivariate_kde(std::span<const Point2> queries, std::span<const Point2> sample);

}  // namespace fkwc::kernels
