#include "fkwc/power.hpp"

#include <algorithm>
#include <cmath>

#include "fkwc/error.hpp"
#include "fkwc/random.hpp"
#include "fkwc/rank_tests.hpp"

namespace fkwc::power {

namespace {

void check_thetas(std::span<const double> thetas) {
  double sum = 0.0;
  for (double t : thetas) {
    if (!(t > 0.0)) throw ParameterError("group proportions must be positive");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ParameterError("group proportions must sum to 1");
}

}  // namespace

double tau_from_pairwise(const Eigen::MatrixXd& probs, std::span<const double> thetas,
                         std::span<const double> group_sizes, double n) {
  const auto J = static_cast<Eigen::Index>(thetas.size());
  if (probs.rows() != J || probs.cols() != J || group_sizes.size() != thetas.size()) {
    throw DimensionError("probability matrix, proportions and group sizes disagree in J");
  }
  if (!(n > 0.0)) throw ParameterError("total sample size must be positive");
  check_thetas(thetas);
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs.data()[i];
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("pairwise probabilities must lie in [0, 1]");
  }
  double s = 0.0;
  for (Eigen::Index j = 0; j < J; ++j) {
    double inner = 0.0;
    for (Eigen::Index k = 0; k < J; ++k) {
      if (k != j) inner += thetas[static_cast<std::size_t>(k)] * (probs(j, k) - 0.5);
    }
    inner *= n;
    s += group_sizes[static_cast<std::size_t>(j)] * inner * inner;
  }
  return 12.0 / (n * (n + 1.0)) * s;
}

MCEstimate mc_rank_prob(const sim::ProcessModel& model_j, const sim::ProcessModel& model_k, int p,
                        std::size_t reps, std::uint64_t seed) {
  if (p != 0 && p != 1) throw ParameterError("derivative order must be 0 or 1");
  if (reps < 1) throw ParameterError("need at least one replicate");
  if (!(model_j.grid == model_k.grid)) throw DimensionError("models must share one grid");
  const Grid& grid = model_j.grid;

  auto scores = [&](const sim::ProcessModel& model, std::uint64_t s) {
    const CurveMatrix x = sim::generate(model, reps, s);
    std::vector<double> out(reps);
    for (std::size_t i = 0; i < reps; ++i) out[i] = l2_norm(row_span(x, static_cast<Eigen::Index>(i)), grid);
    if (p == 1) {
      const CurveMatrix d = differentiate_rows(x, grid);
      for (std::size_t i = 0; i < reps; ++i) out[i] += l2_norm(row_span(d, static_cast<Eigen::Index>(i)), grid);
    }
    return out;
  };
  const std::vector<double> sj = scores(model_j, derive_seed(seed, {stream::replicate, 1}));
  const std::vector<double> sk = scores(model_k, derive_seed(seed, {stream::replicate, 2}));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < reps; ++i) hits += (sk[i] - sj[i] <= 0.0) ? 1 : 0;
  MCEstimate est;
  est.reps = reps;
  est.estimate = static_cast<double>(hits) / static_cast<double>(reps);
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(reps));
  return est;
}

Density Density::analytic(const std::function<double(double)>& pdf, double lo, double hi,
                          std::size_t points) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ParameterError("density support must be a finite interval with lo < hi");
  }
  if (points < 3) throw ParameterError("density tabulation needs at least 3 points");
  Density d;
  d.z_.resize(points);
  d.g_.resize(points);
  const double h = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    d.z_[i] = lo + h * static_cast<double>(i);
    d.g_[i] = pdf(d.z_[i]);
    if (!(d.g_[i] >= 0.0) || !std::isfinite(d.g_[i])) {
      throw ParameterError("density must be finite and non-negative on its support");
    }
  }
  return d;
}

Density Density::histogram(std::span<const double> draws) {
  if (draws.size() < 2) throw ParameterError("histogram needs at least two draws");
  std::vector<double> v(draws.begin(), draws.end());
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return i + 1 < v.size() ? v[i] + f * (v[i + 1] - v[i]) : v[i];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double range = v.back() - v.front();
  if (!(range > 0.0)) throw ParameterError("histogram draws are all equal");
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(v.size()));
  if (!(width > 0.0)) width = range / std::sqrt(static_cast<double>(v.size()));
  const auto bins = static_cast<std::size_t>(std::ceil(range / width));
  const std::size_t nb = std::max<std::size_t>(bins, 1);
  width = range / static_cast<double>(nb);

  Density d;
  d.bin_width_ = width;
  d.z_.resize(nb);
  d.g_.assign(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) d.z_[b] = v.front() + (static_cast<double>(b) + 0.5) * width;
  for (double x : v) {
    auto b = static_cast<std::size_t>((x - v.front()) / width);
    d.g_[std::min(b, nb - 1)] += 1.0;
  }
  const double scale = 1.0 / (static_cast<double>(v.size()) * width);
  for (double& g : d.g_) g *= scale;
  return d;
}

double Density::integral() const {
  double s = 0.0;
  if (is_histogram()) {
    for (double g : g_) s += g * bin_width_;
    return s;
  }
  for (std::size_t i = 1; i < z_.size(); ++i) s += 0.5 * (g_[i] + g_[i - 1]) * (z_[i] - z_[i - 1]);
  return s;
}

double Density::delta_g() const {
  double s = 0.0;
  if (is_histogram()) {
    for (std::size_t i = 0; i < z_.size(); ++i) s += z_[i] * g_[i] * g_[i] * bin_width_;
    return s;
  }
  for (std::size_t i = 1; i < z_.size(); ++i) {
    const double a = z_[i - 1] * g_[i - 1] * g_[i - 1];
    const double b = z_[i] * g_[i] * g_[i];
    s += 0.5 * (a + b) * (z_[i] - z_[i - 1]);
  }
  return s;
}

double local_tau(const LocalAlternativeSpec& spec) {
  if (spec.deltas.size() != spec.thetas.size() || spec.deltas.size() < 2) {
    throw DimensionError("need one delta and one theta per group (J >= 2)");
  }
  check_thetas(spec.thetas);
  const double mass = spec.density.integral();
  if (std::abs(mass - 1.0) > 1e-3) {
    throw ParameterError("density integrates to " + std::to_string(mass) +
                         " on its support grid, not 1 within 1e-3");
  }
  double dbar = 0.0;
  for (std::size_t j = 0; j < spec.deltas.size(); ++j) dbar += spec.thetas[j] * spec.deltas[j];
  double spread = 0.0;
  for (std::size_t j = 0; j < spec.deltas.size(); ++j) {
    spread += spec.thetas[j] * (spec.deltas[j] - dbar) * (spec.deltas[j] - dbar);
  }
  const double dg = spec.density.delta_g();
  return 12.0 * dg * dg * spread;
}

double noncentral_chisq_sf(double x, double df, double tau) {
  if (!(df > 0.0)) throw ParameterError("degrees of freedom must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ParameterError("noncentrality must be >= 0");
  if (std::isnan(x)) throw ParameterError("argument is NaN");
  if (x <= 0.0) return 1.0;
  if (tau == 0.0) return stats::chi_squared_sf(x, df);
  const double lambda = 0.5 * tau;
  const double log_lambda = std::log(lambda);
  const auto k_max = static_cast<std::size_t>(lambda + 40.0 * std::sqrt(lambda) + 200.0);
  double mass = 0.0;
  double sf = 0.0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const auto kd = static_cast<double>(k);
    const double w = std::exp(-lambda + kd * log_lambda - std::lgamma(kd + 1.0));
    mass += w;
    if (w > 0.0) sf += w * stats::chi_squared_sf(x, df + 2.0 * kd);
    if (kd > lambda && 1.0 - mass < 1e-12) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

PowerResult predicted_power(double tau, std::size_t J, double alpha, double n) {
  if (J < 2) throw ParameterError("power needs at least two groups");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  const auto df = static_cast<double>(J - 1);
  const double crit = stats::chi_squared_quantile(1.0 - alpha, df);
  PowerResult r;
  r.tau = tau;
  r.alpha = alpha;
  r.J = J;
  r.N = n;
  r.predicted_power = tau == 0.0 ? alpha : noncentral_chisq_sf(crit, df, tau);
  return r;
}

PowerResult predicted_power(const Eigen::MatrixXd& probs, std::span<const double> thetas, double n,
                            double alpha) {
  check_thetas(thetas);
  std::vector<double> sizes(thetas.size());
  for (std::size_t j = 0; j < thetas.size(); ++j) sizes[j] = thetas[j] * n;
  return predicted_power(tau_from_pairwise(probs, thetas, sizes, n), thetas.size(), alpha, n);
}

SampleSizeResult required_sample_size(double target_power, const Eigen::MatrixXd& probs,
                                      std::span<const double> thetas, double alpha) {
  if (!(target_power > alpha && target_power < 1.0)) {
    throw ParameterError("target power must lie in (alpha, 1)");
  }
  auto power_at = [&](std::size_t n) {
    return predicted_power(probs, thetas, static_cast<double>(n), alpha).predicted_power;
  };
  std::size_t lo = 4 * thetas.size();
  std::size_t hi = 10'000'000;
  SampleSizeResult res;
  const double top = power_at(hi);
  if (top < target_power) {
    res.n = hi;
    res.power = top;
    res.message = "target power " + std::to_string(target_power) + " is not reached for N <= 1e7 (power " +
                  std::to_string(top) + ")";
    return res;
  }
  res.feasible = true;
  if (power_at(lo) >= target_power) {
    res.n = lo;
    res.power = power_at(lo);
    return res;
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (power_at(mid) >= target_power ? hi : lo) = mid;
  }
  res.n = hi;
  res.power = power_at(hi);
  return res;
}

}  // namespace fkwc::power
