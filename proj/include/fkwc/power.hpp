#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fkwc/sim.hpp"

namespace fkwc::power {

/// Noncentrality of the Kruskal–Wallis statistic under a fixed alternative:
/// 12/(N(N+1)) sum_j N_j {N sum_{k != j} theta_k (P_jk − 1/2)}^2 where
/// probs(j, k) = Pr(D(X_j) <= D(X_k)).
double tau_from_pairwise(const Eigen::MatrixXd& probs, std::span<const double> thetas,
                         std::span<const double> group_sizes, double n);

struct MCEstimate {
  double estimate = 0.5;
  double std_error = 0.0;
  std::size_t reps = 0;
};

/// Monte Carlo estimate of Pr(sum_{m=0..p} [||X_k^(m)|| − ||X_j^(m)||] <= 0),
/// which for L2-root depth ranks is Pr(D(X_j) <= D(X_k)). p is 0 (curves
/// only) or 1 (curves and derivatives).
MCEstimate mc_rank_prob(const sim::ProcessModel& model_j, const sim::ProcessModel& model_k, int p,
                        std::size_t reps, std::uint64_t seed);

/// Univariate density tabulated on an increasing support grid.
class Density {
public:
  /// Trapezoid-rule tabulation of `pdf` on [lo, hi].
  static Density analytic(const std::function<double(double)>& pdf, double lo, double hi,
                          std::size_t points = 20001);
  /// Histogram with Freedman–Diaconis bins; values are taken at bin midpoints.
  static Density histogram(std::span<const double> draws);

  double integral() const;
  /// Integral of z g(z)^2.
  double delta_g() const;

  const std::vector<double>& z() const noexcept { return z_; }
  const std::vector<double>& g() const noexcept { return g_; }
  bool is_histogram() const noexcept { return bin_width_ > 0.0; }

private:
  std::vector<double> z_, g_;
  double bin_width_ = 0.0;  // > 0 for histograms (midpoint rule)
};

struct LocalAlternativeSpec {
  std::vector<double> deltas;
  std::vector<double> thetas;
  Density density;
};

/// 12 (int z g^2)^2 sum_j theta_j (delta_j − delta_bar)^2. Throws
/// ParameterError when thetas do not sum to 1 or g does not integrate to 1
/// within 1e-3.
double local_tau(const LocalAlternativeSpec& spec);

/// Poisson mixture of central chi-squared tails, truncated once the
/// remaining Poisson mass is below 1e-12.
double noncentral_chisq_sf(double x, double df, double tau);

struct PowerResult {
  double tau = 0.0;
  double predicted_power = 0.0;
  double alpha = 0.05;
  std::size_t J = 0;
  double N = 0.0;
};

/// Power of the level-alpha test with J − 1 degrees of freedom at noncentrality tau.
PowerResult predicted_power(double tau, std::size_t J, double alpha, double n = 0.0);
/// Power at total size N with N_j = theta_j N.
PowerResult predicted_power(const Eigen::MatrixXd& probs, std::span<const double> thetas, double n,
                            double alpha);

struct SampleSizeResult {
  bool feasible = false;
  std::size_t n = 0;
  double power = 0.0;
  std::string message;
};

/// Smallest total N in [4J, 1e7] with predicted power >= target (groups
/// split by thetas). Infeasible when the target is not reached at 1e7.
SampleSizeResult required_sample_size(double target_power, const Eigen::MatrixXd& probs,
                                      std::span<const double> thetas, double alpha);

}  // namespace fkwc::power
