#include <algorithm>
#include <cmath>

#include "fkwc/error.hpp"
#include "fkwc/rank_tests.hpp"

namespace fkwc::stats {

void TestConfig::validate() const {
  depth.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  if (percentile_r && !(*percentile_r > 0.0 && *percentile_r <= 1.0)) {
    throw ParameterError("percentile r must lie in (0, 1]");
  }
}

namespace {

struct GroupLayout {
  std::size_t n = 0;
  std::vector<std::size_t> sizes;  // by label - 1
};

GroupLayout check_layout(std::span<const std::size_t> ranks, std::span<const int> groups) {
  if (ranks.size() != groups.size()) {
    throw DimensionError("ranks and group labels differ in length");
  }
  GroupLayout g;
  g.n = ranks.size();
  std::vector<bool> seen(g.n + 1, false);
  for (std::size_t r : ranks) {
    if (r < 1 || r > g.n || seen[r]) {
      throw ParameterError("ranks must be a permutation of 1..N");
    }
    seen[r] = true;
  }
  int max_label = 0;
  for (int label : groups) {
    if (label < 1) throw ParameterError("group labels must be 1..J");
    max_label = std::max(max_label, label);
  }
  g.sizes.assign(static_cast<std::size_t>(max_label), 0);
  for (int label : groups) ++g.sizes[static_cast<std::size_t>(label - 1)];
  if (g.sizes.size() < 2) throw ParameterError("at least two groups are required");
  for (std::size_t j = 0; j < g.sizes.size(); ++j) {
    if (g.sizes[j] == 0) {
      throw ParameterError("group " + std::to_string(j + 1) + " is empty");
    }
  }
  return g;
}

std::vector<double> mean_ranks(std::span<const std::size_t> ranks, std::span<const int> groups,
                               const GroupLayout& g) {
  std::vector<double> sums(g.sizes.size(), 0.0);
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    sums[static_cast<std::size_t>(groups[i] - 1)] += static_cast<double>(ranks[i]);
  }
  for (std::size_t j = 0; j < sums.size(); ++j) sums[j] /= static_cast<double>(g.sizes[j]);
  return sums;
}

double kw_from_means(const std::vector<double>& means, const GroupLayout& g) {
  const auto n = static_cast<double>(g.n);
  const double centre = 0.5 * (n + 1.0);
  double s = 0.0;
  for (std::size_t j = 0; j < means.size(); ++j) {
    const double dev = means[j] - centre;
    s += static_cast<double>(g.sizes[j]) * dev * dev;
  }
  return 12.0 / (n * (n + 1.0)) * s;
}

double percentile_from_layout(std::span<const std::size_t> ranks, std::span<const int> groups,
                              const GroupLayout& g, std::size_t cutoff) {
  const auto n = static_cast<double>(g.n);
  const auto np = static_cast<double>(cutoff);
  // Score sum_{s <= N'} (N' − s + 1) delta_j(s): the least deep observations weigh most.
  std::vector<double> score(g.sizes.size(), 0.0);
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] <= cutoff) {
      score[static_cast<std::size_t>(groups[i] - 1)] += static_cast<double>(cutoff - ranks[i] + 1);
    }
  }
  double stat = 0.0;
  for (std::size_t j = 0; j < g.sizes.size(); ++j) {
    const auto nj = static_cast<double>(g.sizes[j]);
    const double rho = nj * np * (np + 1.0) / (2.0 * n);
    const double sigma2 = nj * (n - nj) * np * (np + 1.0) *
                          (2.0 * n * (2.0 * np + 1.0) - 3.0 * np * (np + 1.0)) /
                          (12.0 * n * n * (n - 1.0));
    const double dev = score[j] - rho;
    stat += (1.0 - nj / n) * dev * dev / sigma2;
  }
  return stat;
}

}  // namespace

double kw_statistic(std::span<const std::size_t> ranks, std::span<const int> groups) {
  const GroupLayout g = check_layout(ranks, groups);
  return kw_from_means(mean_ranks(ranks, groups, g), g);
}

std::size_t percentile_cutoff(std::size_t n, double r) {
  if (!(r > 0.0 && r <= 1.0)) throw ParameterError("percentile r must lie in (0, 1]");
  const double x = r * static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(x + 1e-9 * std::max(1.0, x)));
}

double percentile_statistic(std::span<const std::size_t> ranks, std::span<const int> groups, double r) {
  const GroupLayout g = check_layout(ranks, groups);
  const std::size_t cutoff = percentile_cutoff(g.n, r);
  if (cutoff < 1) throw ParameterError("floor(r N) must be at least 1");
  return percentile_from_layout(ranks, groups, g, cutoff);
}

TestResult test_from_ranks(const RankVector& ranks, std::span<const int> groups,
                           const TestConfig& config) {
  config.validate();
  const GroupLayout g = check_layout(ranks.ranks, groups);
  TestResult res;
  res.n = g.n;
  res.group_sizes = g.sizes;
  res.df = g.sizes.size() - 1;
  res.alpha = config.alpha;
  res.depth_name = config.depth.name();
  res.tie_breaks_applied = ranks.tie_breaks_applied;
  res.group_mean_ranks = mean_ranks(ranks.ranks, groups, g);
  const double centre = 0.5 * (static_cast<double>(g.n) + 1.0);
  for (double m : res.group_mean_ranks) res.group_deviations.push_back((m - centre) * (m - centre));

  if (config.percentile_r) {
    res.kind = StatisticKind::percentile;
    const std::size_t cutoff = percentile_cutoff(g.n, *config.percentile_r);
    if (cutoff < 1) throw ParameterError("floor(r N) must be at least 1");
    if (cutoff < g.sizes.size()) {
      res.warnings.push_back("floor(r N) = " + std::to_string(cutoff) +
                             " is smaller than the number of groups; the statistic is degenerate");
    }
    res.statistic = percentile_from_layout(ranks.ranks, groups, g, cutoff);
  } else {
    res.kind = StatisticKind::kruskal_wallis;
    res.statistic = kw_from_means(res.group_mean_ranks, g);
  }
  res.p_value = chi_squared_sf(res.statistic, static_cast<double>(res.df));
  res.reject = res.p_value < config.alpha;
  return res;
}

TestResult fkwc_test(const FunctionalDataset& ds, const TestConfig& config) {
  config.validate();
  if (ds.num_groups() < 2) throw ParameterError("the test needs at least two groups");
  const RankVector ranks = depth_ranks(ds, config.depth);
  return test_from_ranks(ranks, ds.groups(), config);
}

}  // namespace fkwc::stats
