#include <algorithm>
#include <cmath>
#include <numeric>

#include "fkwc/error.hpp"
#include "fkwc/parallel.hpp"
#include "fkwc/random.hpp"
#include "fkwc/rank_tests.hpp"

namespace fkwc::stats {

std::string_view to_string(Correction c) {
  switch (c) {
    case Correction::sidak: return "sidak";
    case Correction::bonferroni: return "bonferroni";
    case Correction::holm: return "holm";
  }
  return "?";
}

Correction parse_correction(std::string_view name) {
  for (Correction c : {Correction::sidak, Correction::bonferroni, Correction::holm}) {
    if (name == to_string(c)) return c;
  }
  throw ParameterError("unknown correction '" + std::string(name) +
                       "' (expected sidak, bonferroni or holm)");
}

RankSumResult wilcoxon_rank_sum(std::span<const double> first, std::span<const double> second) {
  const std::size_t n1 = first.size();
  const std::size_t n2 = second.size();
  if (n1 == 0 || n2 == 0) throw ParameterError("rank-sum test needs two non-empty samples");
  const std::size_t n = n1 + n2;
  std::vector<double> pooled(first.begin(), first.end());
  pooled.insert(pooled.end(), second.begin(), second.end());
  for (double v : pooled) {
    if (!std::isfinite(v)) throw ParameterError("rank-sum input contains a non-finite value");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });

  std::vector<double> rank(n);
  double tie_term = 0.0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && pooled[order[end]] == pooled[order[start]]) ++end;
    const double mid = 0.5 * static_cast<double>(start + end + 1);
    for (std::size_t i = start; i < end; ++i) rank[order[i]] = mid;
    const auto t = static_cast<double>(end - start);
    tie_term += t * t * t - t;
    start = end;
  }

  RankSumResult res;
  for (std::size_t i = 0; i < n1; ++i) res.rank_sum += rank[i];
  const auto a = static_cast<double>(n1);
  const auto b = static_cast<double>(n2);
  const auto nn = static_cast<double>(n);
  const double mean = a * (nn + 1.0) / 2.0;
  const double var = n > 1 ? a * b / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0))) : 0.0;
  if (!(var > 0.0)) {
    res.z = 0.0;
    res.p_value = 1.0;
    return res;
  }
  res.z = (res.rank_sum - mean) / std::sqrt(var);
  res.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(res.z)));
  return res;
}

double sidak_adjust(double p, std::size_t m) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p-value must lie in [0, 1]");
  if (m == 0) throw ParameterError("number of comparisons must be positive");
  if (p >= 1.0) return 1.0;
  return std::clamp(-std::expm1(static_cast<double>(m) * std::log1p(-p)), 0.0, 1.0);
}

namespace {

std::vector<double> adjust(const std::vector<double>& raw, std::size_t m, Correction c) {
  std::vector<double> out(raw.size());
  switch (c) {
    case Correction::sidak:
      for (std::size_t i = 0; i < raw.size(); ++i) out[i] = sidak_adjust(raw[i], m);
      break;
    case Correction::bonferroni:
      for (std::size_t i = 0; i < raw.size(); ++i) {
        out[i] = std::min(1.0, raw[i] * static_cast<double>(m));
      }
      break;
    case Correction::holm: {
      std::vector<std::size_t> order(raw.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t x, std::size_t y) { return raw[x] < raw[y]; });
      double running = 0.0;
      for (std::size_t l = 0; l < order.size(); ++l) {
        const double factor = static_cast<double>(m - l);
        running = std::max(running, std::min(1.0, factor * raw[order[l]]));
        out[order[l]] = running;
      }
      break;
    }
  }
  return out;
}

}  // namespace

MCResult steel_mc(const FunctionalDataset& ds, const DepthSpec& spec,
                  std::optional<std::size_t> correction_count, Correction correction) {
  spec.validate();
  const std::size_t J = ds.num_groups();
  if (J < 2) throw ParameterError("multiple comparisons need at least two groups");
  const std::size_t pairs = J * (J - 1) / 2;
  const std::size_t m = correction_count.value_or(pairs);
  if (m < pairs) {
    throw ParameterError("correction count " + std::to_string(m) +
                         " is smaller than the number of comparisons performed (" +
                         std::to_string(pairs) + ")");
  }

  std::vector<std::pair<int, int>> index;
  for (int j = 1; j <= static_cast<int>(J); ++j) {
    for (int k = j + 1; k <= static_cast<int>(J); ++k) index.emplace_back(j, k);
  }

  std::vector<double> raw(pairs);
  parallel_for(pairs, [&](std::size_t p) {
    const auto [j, k] = index[p];
    const int labels[] = {j, k};
    const FunctionalDataset sub = ds.restrict_to_groups(labels);
    DepthSpec local = spec;
    local.rng_seed = derive_seed(spec.rng_seed, {stream::pair, static_cast<std::uint64_t>(j),
                                                 static_cast<std::uint64_t>(k)});
    const DepthVector dv = compute_depth(sub, local);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < sub.size(); ++i) {
      (sub.group(i) == 1 ? a : b).push_back(dv.values[i]);
    }
    raw[p] = wilcoxon_rank_sum(a, b).p_value;
  });

  const std::vector<double> adj = adjust(raw, m, correction);
  MCResult res;
  res.num_comparisons = m;
  res.correction = correction;
  res.depth_name = spec.name();
  res.raw_p = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(J));
  res.adjusted_p = res.raw_p;
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto j = static_cast<Eigen::Index>(index[p].first - 1);
    const auto k = static_cast<Eigen::Index>(index[p].second - 1);
    res.raw_p(j, k) = res.raw_p(k, j) = raw[p];
    res.adjusted_p(j, k) = res.adjusted_p(k, j) = adj[p];
  }
  for (std::size_t j = 0; j < J; ++j) {
    if (ds.group_sizes()[j] < 4) {
      res.warnings.push_back("group " + std::to_string(j + 1) + " has " +
                             std::to_string(ds.group_sizes()[j]) +
                             " curves; the normal approximation is poor below 4");
    }
  }
  return res;
}

}  // namespace fkwc::stats
