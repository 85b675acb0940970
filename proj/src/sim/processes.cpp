#include <cmath>
#include <numbers>
#include <random>

#include "fkwc/error.hpp"
#include "fkwc/random.hpp"
#include "fkwc/sim.hpp"

namespace fkwc::sim {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::student_t1: return "t1";
    case Family::skew_gaussian: return "skew_gaussian";
    case Family::eigen: return "eigen";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::gaussian, Family::student_t1, Family::skew_gaussian, Family::eigen}) {
    if (name == to_string(f)) return f;
  }
  throw ParameterError("unknown process family '" + std::string(name) +
                       "' (expected gaussian, t1, skew_gaussian or eigen)");
}

void ProcessModel::validate() const {
  if (family == Family::eigen) {
    if (eigenvalues.empty()) throw ParameterError("eigen family needs at least one eigenvalue");
    for (double l : eigenvalues) {
      if (!(l >= 0.0) || !std::isfinite(l)) throw ParameterError("eigenvalues must be finite and >= 0");
    }
    return;
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("kernel alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("kernel beta must be positive");
  if (family == Family::skew_gaussian && !(skew_shape >= 0.0)) {
    throw ParameterError("skew shape must be non-negative");
  }
}

double se_kernel(double s, double t, double alpha, double beta) {
  const double d = s - t;
  return beta * std::exp(-d * d / (2.0 * alpha * alpha));
}

Eigen::MatrixXd kernel_matrix(const Grid& grid, double alpha, double beta) {
  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = se_kernel(grid.point(static_cast<std::size_t>(i)),
                                    grid.point(static_cast<std::size_t>(j)), alpha, beta);
    }
  }
  return k;
}

Eigen::MatrixXd kernel_cholesky(const Grid& grid, double alpha, double beta) {
  const Eigen::MatrixXd k = kernel_matrix(grid, alpha, beta);
  for (double jitter : {1e-10, 1e-8, 1e-6}) {
    Eigen::MatrixXd a = k;
    a.diagonal().array() += jitter * beta;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw NumericalError("Cholesky factorization of the kernel matrix failed (alpha = " +
                       std::to_string(alpha) + ", beta = " + std::to_string(beta) +
                       ") even with jitter 1e-6 * beta");
}

CurveMatrix fourier_basis(const Grid& grid, std::size_t k) {
  const auto m = static_cast<Eigen::Index>(grid.size());
  CurveMatrix phi(static_cast<Eigen::Index>(k), m);
  for (std::size_t b = 0; b < k; ++b) {
    for (Eigen::Index t = 0; t < m; ++t) {
      const double x = grid.point(static_cast<std::size_t>(t));
      double v = 1.0;
      if (b > 0) {
        const auto l = static_cast<double>((b + 1) / 2);
        const double arg = 2.0 * std::numbers::pi * l * x;
        v = std::numbers::sqrt2 * (b % 2 == 1 ? std::sin(arg) : std::cos(arg));
      }
      phi(static_cast<Eigen::Index>(b), t) = v;
    }
  }
  return phi;
}

std::vector<double> scenario_eigenvalues(int scenario, int group) {
  if (group != 1 && group != 2) throw ParameterError("scenario group must be 1 or 2");
  if (scenario < 1 || scenario > 6) {
    throw ParameterError("scenario must be 1..6, got " + std::to_string(scenario));
  }
  const int K = (scenario == 1 || scenario == 4) ? 3 : 11;
  const bool exponential = scenario == 3 || scenario == 6;
  const bool reversed = scenario <= 3;
  std::vector<double> lambda(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const int e = (group == 2 && reversed) ? K - k + 1 : k;
    double v = exponential ? std::ldexp(1.0, e) : static_cast<double>(e);
    if (group == 2 && !reversed) v *= 1.5;
    lambda[static_cast<std::size_t>(k - 1)] = v;
  }
  return lambda;
}

ProcessModel scenario_model(int scenario, int group, const Grid& grid) {
  ProcessModel m;
  m.family = Family::eigen;
  m.eigenvalues = scenario_eigenvalues(scenario, group);
  m.grid = grid;
  return m;
}

namespace {

CurveMatrix standard_normals(std::size_t n, std::size_t m, Rng& rng) {
  std::normal_distribution<double> normal;
  CurveMatrix z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(rng);
  return z;
}

void require_family(const ProcessModel& model, Family f) {
  model.validate();
  if (model.family != f) {
    throw ParameterError("generator for " + std::string(to_string(f)) + " called with a " +
                         std::string(to_string(model.family)) + " model");
  }
}

CurveMatrix gp_draws(const ProcessModel& model, std::size_t n, Rng& rng) {
  const Eigen::MatrixXd l = kernel_cholesky(model.grid, model.alpha, model.beta);
  const CurveMatrix z = standard_normals(n, model.grid.size(), rng);
  return z * l.transpose();
}

}  // namespace

CurveMatrix gen_gp(const ProcessModel& model, std::size_t n, std::uint64_t seed) {
  require_family(model, Family::gaussian);
  Rng rng(seed);
  return gp_draws(model, n, rng);
}

CurveMatrix gen_t1(const ProcessModel& model, std::size_t n, std::uint64_t seed) {
  require_family(model, Family::student_t1);
  Rng rng(seed);
  CurveMatrix x = gp_draws(model, n, rng);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double w = 0.0;
    while (!(w >= 1e-300)) {
      const double g = normal(rng);
      w = g * g;
    }
    x.row(i) /= std::sqrt(w);
  }
  return x;
}

CurveMatrix gen_skew_gp(const ProcessModel& model, std::size_t n, std::uint64_t seed) {
  require_family(model, Family::skew_gaussian);
  Rng rng(seed);
  const CurveMatrix z1 = gp_draws(model, n, rng);
  const CurveMatrix z2 = gp_draws(model, n, rng);
  const double a = model.skew_shape;
  const double delta = a / std::sqrt(1.0 + a * a);
  const double shift = delta * std::sqrt(2.0 / std::numbers::pi) * std::sqrt(model.beta);
  CurveMatrix x = delta * z1.cwiseAbs() + std::sqrt(1.0 - delta * delta) * z2;
  x.array() -= shift;
  return x;
}

CurveMatrix gen_eigen(const ProcessModel& model, std::size_t n, std::uint64_t seed) {
  require_family(model, Family::eigen);
  Rng rng(seed);
  const std::size_t k = model.eigenvalues.size();
  CurveMatrix phi = fourier_basis(model.grid, k);
  for (std::size_t b = 0; b < k; ++b) {
    phi.row(static_cast<Eigen::Index>(b)) *= std::sqrt(model.eigenvalues[b]);
  }
  const CurveMatrix xi = standard_normals(n, k, rng);
  return xi * phi;
}

CurveMatrix generate(const ProcessModel& model, std::size_t n, std::uint64_t seed) {
  switch (model.family) {
    case Family::gaussian: return gen_gp(model, n, seed);
    case Family::student_t1: return gen_t1(model, n, seed);
    case Family::skew_gaussian: return gen_skew_gp(model, n, seed);
    case Family::eigen: return gen_eigen(model, n, seed);
  }
  throw ParameterError("unknown process family");
}

FunctionalDataset generate_groups(const std::vector<ProcessModel>& models,
                                  const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  if (models.empty() || models.size() != sizes.size()) {
    throw ParameterError("need one group size per model");
  }
  const Grid& grid = models.front().grid;
  std::size_t total = 0;
  for (std::size_t g = 0; g < models.size(); ++g) {
    if (!(models[g].grid == grid)) throw DimensionError("all group models must share one grid");
    if (sizes[g] == 0) throw ParameterError("group sizes must be positive");
    total += sizes[g];
  }
  CurveMatrix curves(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(grid.size()));
  std::vector<int> labels;
  labels.reserve(total);
  Eigen::Index row = 0;
  for (std::size_t g = 0; g < models.size(); ++g) {
    const CurveMatrix x = generate(models[g], sizes[g], derive_seed(seed, {g + 1}));
    curves.middleRows(row, x.rows()) = x;
    row += x.rows();
    labels.insert(labels.end(), sizes[g], static_cast<int>(g + 1));
  }
  return FunctionalDataset(grid, std::move(curves), std::move(labels));
}

}  // namespace fkwc::sim
