#include "fkwc/depth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fkwc/depth_kernels.hpp"
#include "fkwc/error.hpp"
#include "fkwc/random.hpp"

namespace fkwc {

std::string_view to_string(DepthKind kind) {
  switch (kind) {
    case DepthKind::ltr: return "ltr";
    case DepthKind::rp: return "rp";
    case DepthKind::mfhd: return "mfhd";
    case DepthKind::mbd: return "mbd";
    case DepthKind::spatial: return "spatial";
    case DepthKind::ksd: return "ksd";
  }
  return "?";
}

DepthKind parse_depth_kind(std::string_view name) {
  for (DepthKind k : {DepthKind::ltr, DepthKind::rp, DepthKind::mfhd, DepthKind::mbd,
                      DepthKind::spatial, DepthKind::ksd}) {
    if (name == to_string(k)) return k;
  }
  throw ParameterError("unknown depth '" + std::string(name) +
                       "' (expected ltr, rp, mfhd, mbd, spatial or ksd)");
}

void DepthSpec::validate() const {
  if (num_projections < 1) throw ParameterError("number of projections must be at least 1");
  if (band_order < 2) throw ParameterError("band order must be at least 2");
  if (channel_weights.size() != 2) {
    throw ParameterError("channel weights need exactly two entries (curve, derivative)");
  }
  double sum = 0.0;
  for (double w : channel_weights) {
    if (!(w >= 0.0)) throw ParameterError("channel weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ParameterError("channel weights must sum to 1");
  if (kernel_bandwidth && !(*kernel_bandwidth > 0.0 && std::isfinite(*kernel_bandwidth))) {
    throw ParameterError("kernel bandwidth must be positive");
  }
}

std::string DepthSpec::name() const {
  std::string n;
  switch (kind) {
    case DepthKind::ltr: n = "LTR"; break;
    case DepthKind::rp: n = "RP" + std::to_string(num_projections); break;
    case DepthKind::mfhd: n = "MFHD"; break;
    case DepthKind::mbd: n = "MBD"; break;
    case DepthKind::spatial: n = "SD"; break;
    case DepthKind::ksd: n = "KSD"; break;
  }
  return use_derivatives ? n + "'" : n;
}

namespace {

DepthVector wrap(std::vector<double> values, const DepthSpec& spec) {
  return DepthVector{std::move(values), spec};
}

std::vector<double> blend(const std::vector<double>& a, const std::vector<double>& b,
                          const std::vector<double>& weights) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = weights[0] * a[i] + weights[1] * b[i];
  return out;
}

CurveMatrix projection_directions(const FunctionalDataset& ds, const DepthSpec& spec) {
  const CurveMatrix raw = kernels::random_directions(ds.grid(), spec.num_projections, spec.rng_seed);
  return kernels::scale_directions(raw, kernels::pointwise_scale(ds.curves()), ds.grid());
}

double ksd_sigma2(const CurveMatrix& x, const Grid& grid, const DepthSpec& spec) {
  if (spec.kernel_bandwidth) return *spec.kernel_bandwidth * *spec.kernel_bandwidth;
  const double med = kernels::median_squared_distance(x, grid);
  return med > 0.0 ? med : 1.0;
}

}  // namespace

DepthVector ltr_depth(const FunctionalDataset& ds, int p) {
  if (p != 0 && p != 1) throw ParameterError("L2-root depth supports p = 0 or p = 1");
  DepthSpec spec;
  spec.kind = DepthKind::ltr;
  spec.use_derivatives = p == 1;
  std::vector<std::vector<double>> msd;
  msd.push_back(kernels::mean_squared_distance(ds.curves(), ds.curves(), ds.grid()));
  if (p == 1) {
    const CurveMatrix d = ds.derivatives_or_differentiate();
    msd.push_back(kernels::mean_squared_distance(d, d, ds.grid()));
  }
  return wrap(kernels::ltr_from_channels(msd), spec);
}

std::vector<double> ltr_rank_scores(const FunctionalDataset& ds, int p) {
  if (p != 0 && p != 1) throw ParameterError("L2-root depth supports p = 0 or p = 1");
  std::vector<double> scores(ds.size());
  if (p == 0) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
      scores[i] = inner_product(ds.curve(i), ds.curve(i), ds.grid());
    }
    return scores;
  }
  const CurveMatrix d = ds.derivatives_or_differentiate();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    scores[i] = l2_norm(ds.curve(i), ds.grid()) +
                l2_norm(row_span(d, static_cast<Eigen::Index>(i)), ds.grid());
  }
  return scores;
}

DepthVector rp_depth(const FunctionalDataset& ds, const DepthSpec& spec) {
  spec.validate();
  const CurveMatrix dirs = projection_directions(ds, spec);
  return wrap(kernels::random_projection(ds.curves(), ds.curves(), dirs, ds.grid()), spec);
}

DepthVector rp_depth_deriv(const FunctionalDataset& ds, const DepthSpec& spec) {
  spec.validate();
  const CurveMatrix dirs = projection_directions(ds, spec);
  const CurveMatrix d = ds.derivatives_or_differentiate();
  return wrap(kernels::random_projection_bivariate(ds.curves(), d, ds.curves(), d, dirs, ds.grid()),
              spec);
}

DepthVector mfhd(const FunctionalDataset& ds, const DepthSpec& spec) {
  spec.validate();
  if (!spec.use_derivatives) {
    return wrap(kernels::integrated_halfspace(ds.curves(), ds.curves(), ds.grid()), spec);
  }
  const CurveMatrix d = ds.derivatives_or_differentiate();
  return wrap(kernels::integrated_halfspace_bivariate(ds.curves(), d, ds.curves(), d, ds.grid()),
              spec);
}

DepthVector mbd(const FunctionalDataset& ds, const DepthSpec& spec) {
  spec.validate();
  auto values = kernels::modified_band(ds.curves(), ds.curves(), ds.grid(), spec.band_order);
  if (!spec.use_derivatives) return wrap(std::move(values), spec);
  const CurveMatrix d = ds.derivatives_or_differentiate();
  const auto dvals = kernels::modified_band(d, d, ds.grid(), spec.band_order);
  return wrap(blend(values, dvals, spec.channel_weights), spec);
}

DepthVector spatial_depth(const FunctionalDataset& ds, const DepthSpec& spec) {
  spec.validate();
  auto values = kernels::spatial(ds.curves(), ds.curves(), ds.grid());
  if (!spec.use_derivatives) return wrap(std::move(values), spec);
  const CurveMatrix d = ds.derivatives_or_differentiate();
  return wrap(blend(values, kernels::spatial(d, d, ds.grid()), spec.channel_weights), spec);
}

DepthVector ksd_depth(const FunctionalDataset& ds, const DepthSpec& spec) {
  spec.validate();
  auto values = kernels::kernel_spatial(ds.curves(), ds.curves(), ds.grid(),
                                        ksd_sigma2(ds.curves(), ds.grid(), spec));
  if (!spec.use_derivatives) return wrap(std::move(values), spec);
  const CurveMatrix d = ds.derivatives_or_differentiate();
  const auto dvals = kernels::kernel_spatial(d, d, ds.grid(), ksd_sigma2(d, ds.grid(), spec));
  return wrap(blend(values, dvals, spec.channel_weights), spec);
}

DepthVector compute_depth(const FunctionalDataset& ds, const DepthSpec& spec) {
  switch (spec.kind) {
    case DepthKind::ltr: {
      spec.validate();
      DepthVector v = ltr_depth(ds, spec.use_derivatives ? 1 : 0);
      v.spec = spec;
      return v;
    }
    case DepthKind::rp: return spec.use_derivatives ? rp_depth_deriv(ds, spec) : rp_depth(ds, spec);
    case DepthKind::mfhd: return mfhd(ds, spec);
    case DepthKind::mbd: return mbd(ds, spec);
    case DepthKind::spatial: return spatial_depth(ds, spec);
    case DepthKind::ksd: return ksd_depth(ds, spec);
  }
  throw ParameterError("unknown depth kind");
}

RankVector ranks_from_values(const std::vector<double>& values, std::uint64_t seed) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  RankVector out;
  out.ranks.resize(n);
  Rng rng = make_rng(seed, {stream::tie_break});
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    if (end - start > 1) {
      std::shuffle(order.begin() + static_cast<std::ptrdiff_t>(start),
                   order.begin() + static_cast<std::ptrdiff_t>(end), rng);
      out.tie_breaks_applied += end - start;
    }
    start = end;
  }
  for (std::size_t r = 0; r < n; ++r) out.ranks[order[r]] = r + 1;
  return out;
}

RankVector depth_ranks(const FunctionalDataset& ds, const DepthSpec& spec) {
  spec.validate();
  if (spec.kind == DepthKind::ltr) {
    std::vector<double> scores = ltr_rank_scores(ds, spec.use_derivatives ? 1 : 0);
    for (double& s : scores) s = -s;
    return ranks_from_values(scores, spec.rng_seed);
  }
  return ranks_from_values(compute_depth(ds, spec).values, spec.rng_seed);
}

FunctionalDataset center_by_deepest(const FunctionalDataset& ds, const DepthSpec& spec) {
  spec.validate();
  CurveMatrix curves = ds.curves();
  std::optional<CurveMatrix> derivs;
  if (ds.has_derivatives()) derivs = ds.derivatives();

  for (int label = 1; label <= static_cast<int>(ds.num_groups()); ++label) {
    const std::vector<std::size_t> rows = ds.members(label);
    std::size_t deepest = rows.front();
    if (rows.size() > 1) {
      const int only[] = {label};
      const DepthVector dv = compute_depth(ds.restrict_to_groups(only), spec);
      const auto best = std::max_element(dv.values.begin(), dv.values.end());
      deepest = rows[static_cast<std::size_t>(best - dv.values.begin())];
    }
    const auto src = static_cast<Eigen::Index>(deepest);
    const Eigen::RowVectorXd centre = ds.curves().row(src);
    Eigen::RowVectorXd dcentre;
    if (derivs) dcentre = ds.derivatives().row(src);
    for (std::size_t r : rows) {
      curves.row(static_cast<Eigen::Index>(r)) -= centre;
      if (derivs) derivs->row(static_cast<Eigen::Index>(r)) -= dcentre;
    }
  }
  return FunctionalDataset(ds.grid(), std::move(curves), ds.groups(), std::move(derivs));
}

}  // namespace fkwc
