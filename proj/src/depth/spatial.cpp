#include <algorithm>
#include <cmath>

#include "fkwc/depth_kernels.hpp"
#include "fkwc/error.hpp"
#include "fkwc/parallel.hpp"

namespace fkwc::kernels {

namespace {

void require_compatible(const CurveMatrix& a, const CurveMatrix& b, const Grid& grid) {
  if (a.cols() != b.cols() || static_cast<std::size_t>(a.cols()) != grid.size()) {
    throw DimensionError("query and reference curves must share the grid");
  }
  if (b.rows() == 0) throw ParameterError("reference sample is empty");
}

// Squared distances computed from differences, so identical curves give exactly 0.
Eigen::MatrixXd cross_distances(const CurveMatrix& a, const CurveMatrix& b, const Grid& grid) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  parallel_for(static_cast<std::size_t>(a.rows()), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      d(ii, j) = l2_distance_squared(row_span(a, ii), row_span(b, j), grid);
    }
  });
  return d;
}

Eigen::MatrixXd self_distances(const CurveMatrix& a, const Grid& grid) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = ii + 1; j < n; ++j) {
      d(ii, j) = l2_distance_squared(row_span(a, ii), row_span(a, j), grid);
    }
  });
  return d.selfadjointView<Eigen::Upper>();
}

}  // namespace

std::vector<double> mean_squared_distance(const CurveMatrix& queries, const CurveMatrix& reference,
                                          const Grid& grid) {
  require_compatible(queries, reference, grid);
  const Eigen::MatrixXd d = cross_distances(queries, reference, grid);
  std::vector<double> out(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index i = 0; i < d.rows(); ++i) out[static_cast<std::size_t>(i)] = d.row(i).mean();
  return out;
}

std::vector<double> ltr_from_channels(const std::vector<std::vector<double>>& msd) {
  if (msd.empty()) throw ParameterError("L2-root depth needs at least one channel");
  const auto channels = static_cast<double>(msd.size());
  std::vector<double> out(msd.front().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (const auto& ch : msd) s += std::sqrt(ch[i]);
    out[i] = 1.0 / (1.0 + s / channels);
  }
  return out;
}

std::vector<double> spatial(const CurveMatrix& queries, const CurveMatrix& reference,
                            const Grid& grid) {
  require_compatible(queries, reference, grid);
  const Eigen::MatrixXd qr = cross_distances(queries, reference, grid);
  const Eigen::MatrixXd rr = self_distances(reference, grid);
  const auto n = static_cast<double>(reference.rows());
  std::vector<double> out(static_cast<std::size_t>(queries.rows()));
  parallel_for(out.size(), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    // ||sum_j s(x - X_j)||^2 = sum_jk v_j v_k <x - X_j, x - X_k>, v_j = 1/||x - X_j||
    // (0 for a zero difference), and the inner products come from polarization.
    Eigen::VectorXd v(reference.rows());
    for (Eigen::Index j = 0; j < reference.rows(); ++j) {
      v(j) = qr(ii, j) > 0.0 ? 1.0 / std::sqrt(qr(ii, j)) : 0.0;
    }
    const double sum_v = v.sum();
    const double sum_vd = v.dot(qr.row(ii).transpose());
    const double quad = v.dot(rr * v);
    const double sq = std::max(0.0, sum_vd * sum_v - 0.5 * quad);
    out[i] = 1.0 - std::sqrt(sq) / n;
  });
  return out;
}

double median_squared_distance(const CurveMatrix& reference, const Grid& grid) {
  const Eigen::Index n = reference.rows();
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d.push_back(l2_distance_squared(row_span(reference, i), row_span(reference, j), grid));
    }
  }
  if (d.empty()) return 1.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double med = *mid;
  if (d.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(d.begin(), mid));
  }
  return med;
}

std::vector<double> kernel_spatial(const CurveMatrix& queries, const CurveMatrix& reference,
                                   const Grid& grid, double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ParameterError("kernel bandwidth must be positive");
  }
  require_compatible(queries, reference, grid);
  const Eigen::MatrixXd kq = (-cross_distances(queries, reference, grid).array() / sigma2).exp().matrix();
  const Eigen::MatrixXd kr = (-self_distances(reference, grid).array() / sigma2).exp().matrix();
  const auto n = static_cast<double>(reference.rows());
  std::vector<double> out(static_cast<std::size_t>(queries.rows()));
  parallel_for(out.size(), [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    // Feature-space differences phi(x) - phi(X_j) have squared length 2 - 2 k_j
    // and pairwise inner products 1 - k_j - k_k + K_jk.
    Eigen::VectorXd v(reference.rows());
    for (Eigen::Index j = 0; j < reference.rows(); ++j) {
      const double len2 = 2.0 - 2.0 * kq(ii, j);
      v(j) = len2 > 0.0 ? 1.0 / std::sqrt(len2) : 0.0;
    }
    const double sum_v = v.sum();
    const double sum_vk = v.dot(kq.row(ii).transpose());
    const double quad = v.dot(kr * v);
    const double sq = std::max(0.0, sum_v * sum_v - 2.0 * sum_vk * sum_v + quad);
    out[i] = 1.0 - std::sqrt(sq) / n;
  });
  return out;
}

}  // namespace fkwc::kernels
