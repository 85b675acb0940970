#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fkwc/dataset.hpp"

namespace fkwc {

enum class DepthKind { ltr, rp, mfhd, mbd, spatial, ksd };

std::string_view to_string(DepthKind kind);
/// Accepts the lower-case CLI names: ltr, rp, mfhd, mbd, spatial, ksd.
DepthKind parse_depth_kind(std::string_view name);

/// Which functional depth to use and its options. With `use_derivatives` the
/// primed variant is used: each curve is paired with its first derivative.
struct DepthSpec {
  DepthKind kind = DepthKind::ltr;
  bool use_derivatives = false;
  /// Random projection depth only.
  std::size_t num_projections = 20;
  /// Modified band depth: bands formed by 2..band_order curves.
  std::size_t band_order = 2;
  /// (curve, derivative) weights used by MBD', SD' and KSD'.
  std::vector<double> channel_weights{0.5, 0.5};
  /// Gaussian kernel width sigma of KSD; empty selects the median heuristic.
  std::optional<double> kernel_bandwidth;
  /// Seeds projection directions and rank tie breaking.
  std::uint64_t rng_seed = 0;

  /// Throws ParameterError on an invalid combination.
  void validate() const;
  /// Display name such as "LTR", "RP20'", "MBD'".
  std::string name() const;
};

struct DepthVector {
  std::vector<double> values;
  DepthSpec spec;
};

/// Depth-based ranks: a permutation of 1..N with rank N the deepest curve.
struct RankVector {
  std::vector<std::size_t> ranks;
  /// Number of observations whose rank was settled by random tie breaking.
  std::size_t tie_breaks_applied = 0;
};

// Dataset-level depths: every curve is evaluated against the pooled sample it
// belongs to (the empirical distribution that puts mass 1/N on each curve).
// Derivative variants use the dataset's derivatives when supplied and finite
// differences otherwise.

/// L2-root depth; p = 0 uses the curves only, p = 1 adds the derivatives.
DepthVector ltr_depth(const FunctionalDataset& ds, int p = 0);
/// Squared norms (p = 0) or the sum of curve and derivative norms (p = 1).
/// Larger score means smaller LTR depth for centred data.
std::vector<double> ltr_rank_scores(const FunctionalDataset& ds, int p = 0);
DepthVector rp_depth(const FunctionalDataset& ds, const DepthSpec& spec);
DepthVector rp_depth_deriv(const FunctionalDataset& ds, const DepthSpec& spec);
DepthVector mfhd(const FunctionalDataset& ds, const DepthSpec& spec);
DepthVector mbd(const FunctionalDataset& ds, const DepthSpec& spec);
DepthVector spatial_depth(const FunctionalDataset& ds, const DepthSpec& spec);
DepthVector ksd_depth(const FunctionalDataset& ds, const DepthSpec& spec);

/// Dispatches on spec.kind / spec.use_derivatives.
DepthVector compute_depth(const FunctionalDataset& ds, const DepthSpec& spec);

/// Ascending ranks of `values` (smallest value gets rank 1). Exact ties are
/// broken by a uniform shuffle drawn from `seed`.
RankVector ranks_from_values(const std::vector<double>& values, std::uint64_t seed);

/// Depth ranks over the pooled sample. The LTR path ranks by ltr_rank_scores,
/// which needs no estimate of the pooled distribution.
RankVector depth_ranks(const FunctionalDataset& ds, const DepthSpec& spec);

/// Within each group subtracts the group's deepest curve (depth computed
/// against that group alone; ties go to the lowest index). Derivative
/// curves, when present, are shifted by the deepest curve's derivative.
FunctionalDataset center_by_deepest(const FunctionalDataset& ds, const DepthSpec& spec);

}  // namespace fkwc
