#include <algorithm>

#include "fkwc/depth_kernels.hpp"
#include "fkwc/error.hpp"
#include "fkwc/parallel.hpp"

namespace fkwc::kernels {

namespace {

// Binomial coefficient as a double; exact while the result stays below 2^53.
double choose(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

}  // namespace

std::vector<double> modified_band(const CurveMatrix& queries, const CurveMatrix& reference,
                                  const Grid& grid, std::size_t band_order) {
  if (band_order < 2) throw ParameterError("band order must be at least 2");
  if (queries.cols() != reference.cols() || static_cast<std::size_t>(queries.cols()) != grid.size()) {
    throw DimensionError("query and reference curves must share the grid");
  }
  const auto n = static_cast<std::size_t>(reference.rows());
  const std::size_t nq = static_cast<std::size_t>(queries.rows());
  const std::size_t top = std::min(band_order, n);
  if (top < 2) return std::vector<double>(nq, 1.0);

  std::vector<double> total_bands(top + 1, 0.0);
  for (std::size_t k = 2; k <= top; ++k) total_bands[k] = choose(n, k);

  const auto w = grid.weights();
  const auto m = grid.size();
  // fraction[t][i]: sum over band sizes of the share of bands containing query i at t.
  std::vector<std::vector<double>> fraction(m, std::vector<double>(nq));
  parallel_for(m, [&](std::size_t t) {
    const auto tt = static_cast<Eigen::Index>(t);
    std::vector<double> column(reference.col(tt).begin(), reference.col(tt).end());
    std::sort(column.begin(), column.end());
    for (std::size_t i = 0; i < nq; ++i) {
      const double v = queries(static_cast<Eigen::Index>(i), tt);
      // A band misses v only when all its curves lie strictly on one side.
      const auto below = static_cast<std::size_t>(
          std::lower_bound(column.begin(), column.end(), v) - column.begin());
      const auto above = static_cast<std::size_t>(
          column.end() - std::upper_bound(column.begin(), column.end(), v));
      double s = 0.0;
      for (std::size_t k = 2; k <= top; ++k) {
        const double containing = total_bands[k] - choose(below, k) - choose(above, k);
        s += containing / total_bands[k];
      }
      fraction[t][i] = s;
    }
  });
  std::vector<double> out(nq, 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t i = 0; i < nq; ++i) out[i] += w[t] * fraction[t][i];
  }
  return out;
}

}  // namespace fkwc::kernels
