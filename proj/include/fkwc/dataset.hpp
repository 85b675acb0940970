#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fkwc/grid.hpp"

namespace fkwc {

/// N curves stored row-wise (one curve per row, one grid point per column).
using CurveMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Row `i` of a curve matrix as a span.
inline std::span<const double> row_span(const CurveMatrix& x, Eigen::Index i) {
  return {x.data() + i * x.cols(), static_cast<std::size_t>(x.cols())};
}

/// Finite-difference derivative of every row.
CurveMatrix differentiate_rows(const CurveMatrix& curves, const Grid& grid);

/// Pooled functional sample: N curves on a common grid, each carrying a group
/// label in {1..J}, optionally with externally supplied derivative curves.
///
/// Construction validates every invariant (finite values, matching shapes,
/// every label 1..J present) and throws InputError on violation.
class FunctionalDataset {
public:
  FunctionalDataset(Grid grid, CurveMatrix curves, std::vector<int> groups,
                    std::optional<CurveMatrix> derivatives = std::nullopt);

  static FunctionalDataset from_curves(Grid grid, const std::vector<Curve>& curves,
                                       std::vector<int> groups);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return groups_.size(); }
  std::size_t num_groups() const noexcept { return group_sizes_.size(); }
  const std::vector<int>& groups() const noexcept { return groups_; }
  int group(std::size_t i) const { return groups_.at(i); }

  /// N_1..N_J, indexed by label − 1.
  const std::vector<std::size_t>& group_sizes() const noexcept { return group_sizes_; }

  const CurveMatrix& curves() const noexcept { return curves_; }
  std::span<const double> curve(std::size_t i) const;

  bool has_derivatives() const noexcept { return derivatives_.has_value(); }
  /// Supplied derivatives; throws ParameterError when absent.
  const CurveMatrix& derivatives() const;
  /// Supplied derivatives when present, finite differences otherwise.
  CurveMatrix derivatives_or_differentiate() const;

  FunctionalDataset with_derivatives(CurveMatrix derivatives) const;
  FunctionalDataset with_finite_difference_derivatives() const;
  FunctionalDataset without_derivatives() const;

  /// Indices of the curves carrying `label`.
  std::vector<std::size_t> members(int label) const;

  /// Keeps the listed groups only and relabels them 1..k in the order given.
  FunctionalDataset restrict_to_groups(std::span<const int> labels) const;

  /// Keeps rows in the given order (labels unchanged, so every label must remain).
  FunctionalDataset select_rows(std::span<const std::size_t> rows) const;

private:
  Grid grid_;
  CurveMatrix curves_;
  std::vector<int> groups_;
  std::optional<CurveMatrix> derivatives_;
  std::vector<std::size_t> group_sizes_;
};

}  // namespace fkwc
