#include "fkwc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fkwc/error.hpp"

namespace fkwc {

CurveMatrix differentiate_rows(const CurveMatrix& curves, const Grid& grid) {
  CurveMatrix out(curves.rows(), curves.cols());
  for (Eigen::Index i = 0; i < curves.rows(); ++i) {
    const Curve d = differentiate(row_span(curves, i), grid);
    std::copy(d.begin(), d.end(), out.data() + i * out.cols());
  }
  return out;
}

namespace {

void require_finite(const CurveMatrix& x, const char* what) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
      if (!std::isfinite(x(i, k))) {
        throw InputError(std::string(what) + " row " + std::to_string(i) + ", column " +
                         std::to_string(k) + " is not finite");
      }
    }
  }
}

}  // namespace

FunctionalDataset::FunctionalDataset(Grid grid, CurveMatrix curves, std::vector<int> groups,
                                     std::optional<CurveMatrix> derivatives)
    : grid_(std::move(grid)),
      curves_(std::move(curves)),
      groups_(std::move(groups)),
      derivatives_(std::move(derivatives)) {
  if (groups_.empty()) {
    throw InputError("dataset has no curves");
  }
  if (static_cast<std::size_t>(curves_.rows()) != groups_.size()) {
    throw InputError("dataset has " + std::to_string(curves_.rows()) + " curves but " +
                     std::to_string(groups_.size()) + " group labels");
  }
  if (static_cast<std::size_t>(curves_.cols()) != grid_.size()) {
    throw DimensionError("curves have " + std::to_string(curves_.cols()) +
                         " values but the grid has " + std::to_string(grid_.size()) + " points");
  }
  require_finite(curves_, "curve");
  if (derivatives_) {
    if (derivatives_->rows() != curves_.rows() || derivatives_->cols() != curves_.cols()) {
      throw DimensionError("derivative curves must have the same shape as the curves");
    }
    require_finite(*derivatives_, "derivative");
  }

  const int max_label = *std::max_element(groups_.begin(), groups_.end());
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i] < 1) {
      throw InputError("row " + std::to_string(i) + " has group label " +
                       std::to_string(groups_[i]) + "; labels must be 1..J");
    }
  }
  group_sizes_.assign(static_cast<std::size_t>(max_label), 0);
  for (int g : groups_) {
    ++group_sizes_[static_cast<std::size_t>(g - 1)];
  }
  for (std::size_t j = 0; j < group_sizes_.size(); ++j) {
    if (group_sizes_[j] == 0) {
      throw InputError("group label " + std::to_string(j + 1) +
                       " never appears; labels must cover 1.." + std::to_string(max_label));
    }
  }
}

FunctionalDataset FunctionalDataset::from_curves(Grid grid, const std::vector<Curve>& curves,
                                                 std::vector<int> groups) {
  CurveMatrix x(static_cast<Eigen::Index>(curves.size()), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (curves[i].size() != grid.size()) {
      throw DimensionError("curve " + std::to_string(i) + " has " +
                           std::to_string(curves[i].size()) + " values but the grid has " +
                           std::to_string(grid.size()) + " points");
    }
    std::copy(curves[i].begin(), curves[i].end(), x.data() + static_cast<Eigen::Index>(i) * x.cols());
  }
  return FunctionalDataset(std::move(grid), std::move(x), std::move(groups));
}

std::span<const double> FunctionalDataset::curve(std::size_t i) const {
  if (i >= size()) {
    throw ParameterError("curve index " + std::to_string(i) + " out of range");
  }
  return row_span(curves_, static_cast<Eigen::Index>(i));
}

const CurveMatrix& FunctionalDataset::derivatives() const {
  if (!derivatives_) {
    throw ParameterError("dataset carries no derivative curves");
  }
  return *derivatives_;
}

CurveMatrix FunctionalDataset::derivatives_or_differentiate() const {
  return derivatives_ ? *derivatives_ : differentiate_rows(curves_, grid_);
}

FunctionalDataset FunctionalDataset::with_derivatives(CurveMatrix derivatives) const {
  return FunctionalDataset(grid_, curves_, groups_, std::move(derivatives));
}

FunctionalDataset FunctionalDataset::with_finite_difference_derivatives() const {
  return with_derivatives(differentiate_rows(curves_, grid_));
}

FunctionalDataset FunctionalDataset::without_derivatives() const {
  return FunctionalDataset(grid_, curves_, groups_);
}

std::vector<std::size_t> FunctionalDataset::members(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i] == label) out.push_back(i);
  }
  return out;
}

FunctionalDataset FunctionalDataset::restrict_to_groups(std::span<const int> labels) const {
  std::vector<std::size_t> rows;
  std::vector<int> new_groups;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    const auto it = std::find(labels.begin(), labels.end(), groups_[i]);
    if (it != labels.end()) {
      rows.push_back(i);
      new_groups.push_back(static_cast<int>(it - labels.begin()) + 1);
    }
  }
  CurveMatrix x(static_cast<Eigen::Index>(rows.size()), curves_.cols());
  std::optional<CurveMatrix> d;
  if (derivatives_) d.emplace(x.rows(), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = static_cast<Eigen::Index>(rows[r]);
    x.row(static_cast<Eigen::Index>(r)) = curves_.row(src);
    if (d) d->row(static_cast<Eigen::Index>(r)) = derivatives_->row(src);
  }
  return FunctionalDataset(grid_, std::move(x), std::move(new_groups), std::move(d));
}

FunctionalDataset FunctionalDataset::select_rows(std::span<const std::size_t> rows) const {
  CurveMatrix x(static_cast<Eigen::Index>(rows.size()), curves_.cols());
  std::optional<CurveMatrix> d;
  if (derivatives_) d.emplace(x.rows(), x.cols());
  std::vector<int> g;
  g.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) throw ParameterError("row index out of range");
    const auto src = static_cast<Eigen::Index>(rows[r]);
    x.row(static_cast<Eigen::Index>(r)) = curves_.row(src);
    if (d) d->row(static_cast<Eigen::Index>(r)) = derivatives_->row(src);
    g.push_back(groups_[rows[r]]);
  }
  return FunctionalDataset(grid_, std::move(x), std::move(g), std::move(d));
}

}  // namespace fkwc
