#include <algorithm>
#include <cmath>
#include <numbers>

#include "fkwc/depth_kernels.hpp"
#include "fkwc/error.hpp"
#include "fkwc/parallel.hpp"
#include "fkwc/random.hpp"

namespace fkwc::kernels {

namespace {

double median_in_place(std::vector<double>& v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double med = *mid;
  if (v.size() % 2 == 0) med = 0.5 * (med + *std::max_element(v.begin(), mid));
  return med;
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Projections of every row onto every direction: result(d, i) = <row_i, dir_d>.
Eigen::MatrixXd project(const CurveMatrix& curves, const CurveMatrix& directions, const Grid& grid) {
  const Eigen::Map<const Eigen::VectorXd> w(grid.weights().data(),
                                            static_cast<Eigen::Index>(grid.size()));
  const CurveMatrix weighted = directions * w.asDiagonal();
  return weighted * curves.transpose();
}

}  // namespace

CurveMatrix random_directions(const Grid& grid, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ParameterError("need at least one projection direction");
  const auto m = static_cast<Eigen::Index>(grid.size());
  CurveMatrix dirs(static_cast<Eigen::Index>(count), m);
  std::vector<double> raw(static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < count; ++k) {
    auto rng = make_rng(seed, {stream::projection, k});
    std::normal_distribution<double> normal;
    for (double& z : raw) z = normal(rng);
    for (Eigen::Index t = 0; t < m; ++t) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, t - 2);
      const Eigen::Index hi = std::min<Eigen::Index>(m - 1, t + 2);
      double s = 0.0;
      for (Eigen::Index u = lo; u <= hi; ++u) s += raw[static_cast<std::size_t>(u)];
      dirs(static_cast<Eigen::Index>(k), t) = s / static_cast<double>(hi - lo + 1);
    }
    const double norm = l2_norm(row_span(dirs, static_cast<Eigen::Index>(k)), grid);
    if (!(norm > 0.0)) throw NumericalError("degenerate projection direction");
    dirs.row(static_cast<Eigen::Index>(k)) /= norm;
  }
  return dirs;
}

std::vector<double> pointwise_scale(const CurveMatrix& reference) {
  std::vector<double> scale(static_cast<std::size_t>(reference.cols()), 1.0);
  std::vector<double> col(static_cast<std::size_t>(reference.rows()));
  for (Eigen::Index t = 0; t < reference.cols(); ++t) {
    for (Eigen::Index i = 0; i < reference.rows(); ++i) col[static_cast<std::size_t>(i)] = reference(i, t);
    const double sd = sample_sd(col);
    const double med = median_in_place(col);
    for (double& x : col) x = std::abs(x - med);
    const double mad = median_in_place(col);
    scale[static_cast<std::size_t>(t)] = mad > 0.0 ? mad : (sd > 0.0 ? sd : 1.0);
  }
  return scale;
}

CurveMatrix scale_directions(const CurveMatrix& directions, std::span<const double> scale,
                             const Grid& grid) {
  if (scale.size() != static_cast<std::size_t>(directions.cols())) {
    throw DimensionError("scale must have one entry per grid point");
  }
  CurveMatrix out = directions;
  for (Eigen::Index k = 0; k < out.rows(); ++k) {
    for (Eigen::Index t = 0; t < out.cols(); ++t) out(k, t) /= scale[static_cast<std::size_t>(t)];
    const double norm = l2_norm(row_span(out, k), grid);
    if (!(norm > 0.0)) throw NumericalError("degenerate projection direction");
    out.row(k) /= norm;
  }
  return out;
}

std::vector<double> random_projection(const CurveMatrix& queries, const CurveMatrix& reference,
                                      const CurveMatrix& directions, const Grid& grid) {
  if (reference.rows() == 0) throw ParameterError("reference sample is empty");
  const Eigen::MatrixXd pq = project(queries, directions, grid);
  const Eigen::MatrixXd pr = project(reference, directions, grid);
  const auto n = static_cast<double>(reference.rows());
  const auto nq = static_cast<std::size_t>(queries.rows());
  std::vector<double> out(nq, 0.0);
  std::vector<double> sorted(static_cast<std::size_t>(reference.rows()));
  for (Eigen::Index d = 0; d < directions.rows(); ++d) {
    std::copy(pr.row(d).begin(), pr.row(d).end(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < nq; ++i) {
      const double z = pq(d, static_cast<Eigen::Index>(i));
      const auto lo = std::lower_bound(sorted.begin(), sorted.end(), z);
      const auto hi = std::upper_bound(lo, sorted.end(), z);
      const double f = (static_cast<double>(lo - sorted.begin()) + 0.5 * static_cast<double>(hi - lo)) / n;
      out[i] += f * (1.0 - f);
    }
  }
  for (double& v : out) v /= static_cast<double>(directions.rows());
  return out;
}

std::vector<double> bivariate_kde(std::span<const Point2> queries, std::span<const Point2> sample) {
  const std::size_t n = sample.size();
  if (n == 0) throw ParameterError("reference sample is empty");
  std::vector<double> xs(n), ys(n);
  for (std::size_t j = 0; j < n; ++j) {
    xs[j] = sample[j].x;
    ys[j] = sample[j].y;
  }
  const double factor = std::pow(static_cast<double>(n), -1.0 / 6.0);
  const double hx = factor * sample_sd(xs);
  const double hy = factor * sample_sd(ys);
  const bool use_x = hx > 0.0;
  const bool use_y = hy > 0.0;
  std::vector<double> out(queries.size(), 1.0);
  if (!use_x && !use_y) return out;

  const double norm_x = use_x ? 1.0 / (std::sqrt(2.0 * std::numbers::pi) * hx) : 1.0;
  const double norm_y = use_y ? 1.0 / (std::sqrt(2.0 * std::numbers::pi) * hy) : 1.0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double e = 0.0;
      if (use_x) {
        const double u = (queries[i].x - xs[j]) / hx;
        e += u * u;
      }
      if (use_y) {
        const double u = (queries[i].y - ys[j]) / hy;
        e += u * u;
      }
      s += std::exp(-0.5 * e);
    }
    out[i] = norm_x * norm_y * s / static_cast<double>(n);
  }
  return out;
}

std::vector<double> random_projection_bivariate(const CurveMatrix& queries,
                                                const CurveMatrix& query_derivs,
                                                const CurveMatrix& reference,
                                                const CurveMatrix& reference_derivs,
                                                const CurveMatrix& directions, const Grid& grid) {
  if (query_derivs.rows() != queries.rows() || reference_derivs.rows() != reference.rows()) {
    throw DimensionError("derivative channel must have one row per curve");
  }
  const Eigen::MatrixXd pq = project(queries, directions, grid);
  const Eigen::MatrixXd pqd = project(query_derivs, directions, grid);
  const Eigen::MatrixXd pr = project(reference, directions, grid);
  const Eigen::MatrixXd prd = project(reference_derivs, directions, grid);
  const auto nq = static_cast<std::size_t>(queries.rows());
  const auto nd = static_cast<std::size_t>(directions.rows());

  std::vector<std::vector<double>> per_direction(nd);
  parallel_for(nd, [&](std::size_t k) {
    const auto d = static_cast<Eigen::Index>(k);
    std::vector<Point2> cloud(static_cast<std::size_t>(reference.rows()));
    for (Eigen::Index j = 0; j < reference.rows(); ++j) {
      cloud[static_cast<std::size_t>(j)] = {pr(d, j), prd(d, j)};
    }
    std::vector<Point2> q(nq);
    for (std::size_t i = 0; i < nq; ++i) {
      q[i] = {pq(d, static_cast<Eigen::Index>(i)), pqd(d, static_cast<Eigen::Index>(i))};
    }
    per_direction[k] = bivariate_kde(q, cloud);
  });
  std::vector<double> out(nq, 0.0);
  for (const auto& dv : per_direction) {
    for (std::size_t i = 0; i < nq; ++i) out[i] += dv[i];
  }
  for (double& v : out) v /= static_cast<double>(nd);
  return out;
}

}  // namespace fkwc::kernels
