#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fkwc/error.hpp"
#include "fkwc/parallel.hpp"
#include "fkwc/sim.hpp"

using namespace fkwc;
using namespace fkwc::sim;
using Catch::Approx;

namespace {

std::vector<double> column(const CurveMatrix& x, Eigen::Index t) {
  std::vector<double> c(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) c[static_cast<std::size_t>(i)] = x(i, t);
  return c;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double central_moment(const std::vector<double>& v, int k) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += std::pow(x - m, k);
  return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(p * static_cast<double>(v.size() - 1))];
}

// Two-sample Kolmogorov–Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

ProcessModel model(Family f, std::size_t m = 41) {
  ProcessModel p;
  p.family = f;
  p.grid = Grid(m);
  return p;
}

}  // namespace

TEST_CASE("squared exponential kernel", "[sim]") {
  for (double t : {0.0, 0.3, 1.0}) CHECK(se_kernel(t, t, 0.05, 2.5) == 2.5);
  CHECK(se_kernel(0.0, 0.05, 0.05, 1.0) == Approx(0.60653).margin(1e-5));
  const Eigen::MatrixXd k = kernel_matrix(Grid(11), 0.2, 1.5);
  CHECK(k.isApprox(k.transpose()));
  const Eigen::MatrixXd l = kernel_cholesky(Grid(11), 0.2, 1.5);
  CHECK((l * l.transpose() - k).cwiseAbs().maxCoeff() < 1e-8);
  // Very smooth kernel on a fine grid is numerically singular; jitter must rescue it.
  const Eigen::MatrixXd smooth = kernel_cholesky(Grid(101), 1.0, 1.0);
  CHECK(smooth.allFinite());
}

TEST_CASE("model validation", "[sim]") {
  ProcessModel p;
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = ProcessModel{};
  p.family = Family::eigen;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.eigenvalues = {1.0, -1.0};
  CHECK_THROWS_AS(p.validate(), ParameterError);
  CHECK(parse_family("t1") == Family::student_t1);
  CHECK_THROWS_AS(parse_family("cauchy"), ParameterError);
  CHECK_THROWS_AS(gen_t1(model(Family::gaussian), 3, 1), ParameterError);
}

TEST_CASE("gaussian process covariance", "[sim]") {
  ProcessModel p = model(Family::gaussian, 21);
  p.alpha = 0.2;
  const std::size_t n = 20000;
  const CurveMatrix x = gen_gp(p, n, 1);
  const Eigen::MatrixXd k = kernel_matrix(p.grid, p.alpha, p.beta);
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  CHECK((cov - k).norm() / k.norm() < 0.05);

  // One entry within 3 standard errors: Var(X_s X_t) = K_ss K_tt + K_st^2.
  const Eigen::Index s = 3, t = 6;
  const double se = std::sqrt((k(s, s) * k(t, t) + k(s, t) * k(s, t)) / static_cast<double>(n));
  CHECK(std::abs(cov(s, t) - k(s, t)) < 3 * se);
  CHECK(std::abs(x.mean()) < 0.05);

  CHECK(gen_gp(p, 5, 9) == gen_gp(p, 5, 9));
  CHECK(gen_gp(p, 5, 9) != gen_gp(p, 5, 10));
}

TEST_CASE("student t1 process", "[sim]") {
  const ProcessModel p = model(Family::student_t1);
  const std::size_t n = 5000;
  const CurveMatrix x = gen_t1(p, n, 2);
  CHECK(x.allFinite());
  for (Eigen::Index t = 0; t < x.cols(); t += 5) {
    const auto c = column(x, t);
    const double iqr = quantile(c, 0.75) - quantile(c, 0.25);
    CHECK(std::abs(median(c)) < 3 * iqr / std::sqrt(static_cast<double>(n)));
  }
  // Heavy tails: sample kurtosis is huge for every seed tried.
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto c = column(gen_t1(p, n, seed), 20);
    CHECK(central_moment(c, 4) / std::pow(central_moment(c, 2), 2) > 20.0);
  }
  // beta -> c^2 beta scales the curves by c.
  ProcessModel big = p;
  big.beta = 4.0;
  auto scaled = column(x, 10);
  for (double& v : scaled) v *= 2.0;
  CHECK(ks_distance(scaled, column(gen_t1(big, n, 77), 10)) < 0.05);
}

TEST_CASE("skewed gaussian process", "[sim]") {
  const std::size_t n = 10000;
  ProcessModel p = model(Family::skew_gaussian);
  p.skew_shape = 0.0;
  CHECK(ks_distance(column(gen_skew_gp(p, 5000, 1), 7), column(gen_gp(model(Family::gaussian), 5000, 2), 7)) < 0.05);

  double prev_skew = 0.0;
  for (double a : {1.0, 4.0, 10.0}) {
    p.skew_shape = a;
    const auto c = column(gen_skew_gp(p, n, 3), 15);
    const double skew = central_moment(c, 3) / std::pow(central_moment(c, 2), 1.5);
    CHECK(skew > prev_skew);
    prev_skew = skew;

    const double delta = a / std::sqrt(1 + a * a);
    const double var = p.beta * (1 - 2 * delta * delta / std::numbers::pi);
    const double m2 = central_moment(c, 2);
    const double se = std::sqrt((central_moment(c, 4) - m2 * m2) / static_cast<double>(n));
    CHECK(std::abs(m2 - var) < 3 * se);
    CHECK(std::abs(mean(c)) < 3 * std::sqrt(var / static_cast<double>(n)));
  }
}

TEST_CASE("scenario catalogue", "[sim][eigen]") {
  auto trace = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  };
  CHECK(trace(scenario_eigenvalues(1, 1)) == 6.0);
  CHECK(trace(scenario_eigenvalues(1, 2)) == 6.0);
  CHECK(trace(scenario_eigenvalues(4, 2)) / trace(scenario_eigenvalues(4, 1)) == Approx(1.5));
  for (int s = 1; s <= 6; ++s) {
    const int K = (s == 1 || s == 4) ? 3 : 11;
    const auto l1 = scenario_eigenvalues(s, 1);
    const auto l2 = scenario_eigenvalues(s, 2);
    REQUIRE(l1.size() == static_cast<std::size_t>(K));
    REQUIRE(l2.size() == static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) {
      const auto i = static_cast<std::size_t>(k - 1);
      const bool expo = s == 3 || s == 6;
      const double first = expo ? std::pow(2.0, k) : k;
      CHECK(l1[i] == first);
      if (s <= 3) {
        CHECK(l2[i] == (expo ? std::pow(2.0, K - k + 1) : K - k + 1));
      } else {
        CHECK(l2[i] == 1.5 * first);
      }
    }
  }
  CHECK_THROWS_AS(scenario_eigenvalues(7, 1), ParameterError);
  CHECK_THROWS_AS(scenario_eigenvalues(1, 3), ParameterError);
}

TEST_CASE("eigen family projections", "[sim][eigen]") {
  const Grid g(201);
  const CurveMatrix basis = fourier_basis(g, 5);
  for (Eigen::Index a = 0; a < 5; ++a) {
    for (Eigen::Index b = 0; b < 5; ++b) {
      const double ip = inner_product(row_span(basis, a), row_span(basis, b), g);
      CHECK(ip == Approx(a == b ? 1.0 : 0.0).margin(1e-10));
    }
  }
  ProcessModel p = scenario_model(2, 1, g);
  p.eigenvalues.resize(5);
  const std::size_t n = 10000;
  const CurveMatrix x = gen_eigen(p, n, 4);
  for (Eigen::Index k = 0; k < 5; ++k) {
    std::vector<double> proj(n);
    for (std::size_t i = 0; i < n; ++i) {
      proj[i] = inner_product(row_span(x, static_cast<Eigen::Index>(i)), row_span(basis, k), g);
    }
    const double lambda = p.eigenvalues[static_cast<std::size_t>(k)];
    const double se = lambda * std::sqrt(2.0 / static_cast<double>(n));
    CHECK(std::abs(central_moment(proj, 2) - lambda) < 3 * se);
  }
}

TEST_CASE("generate_groups streams", "[sim]") {
  const ProcessModel a = model(Family::gaussian);
  const FunctionalDataset ds = generate_groups({a, a}, {4, 6}, 11);
  CHECK(ds.group_sizes() == std::vector<std::size_t>{4, 6});
  // Group 1 does not depend on group 2's size.
  const FunctionalDataset other = generate_groups({a, a}, {4, 9}, 11);
  CHECK(ds.curves().topRows(4) == other.curves().topRows(4));
  CHECK_THROWS_AS(generate_groups({a}, {4, 6}, 1), ParameterError);
}

TEST_CASE("run_study is reproducible across thread counts", "[sim][study]") {
  StudySpec spec;
  ProcessModel m = model(Family::gaussian, 31);
  spec.models = {m, m};
  spec.group_sizes = {15, 15};
  DepthSpec ltr, rp;
  rp.kind = DepthKind::rp;
  spec.depths = {ltr, rp};
  spec.replications = 30;
  spec.seed = 5;
  spec.sweep = Sweep{"beta", {1.0, 3.0}, {2}};

  set_thread_count(1);
  const StudyResult one = run_study(spec);
  set_thread_count(4);
  const StudyResult four = run_study(spec);
  set_thread_count(0);
  REQUIRE(one.rows.size() == 4);
  std::ostringstream a, b;
  write_study_csv(a, one);
  write_study_csv(b, four);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("depth,family,param_name,param_value,N,rate,se,R\n", 0) == 0);
  for (const StudyRow& r : one.rows) {
    CHECK(r.replications == 30);
    CHECK(r.n == 30);
    CHECK(r.se == Approx(std::sqrt(r.rate * (1 - r.rate) / 30)).margin(1e-15));
  }
}

TEST_CASE("run_study size under the null", "[sim][study]") {
  StudySpec spec;
  const ProcessModel m = model(Family::gaussian, 51);
  spec.models = {m, m};
  spec.group_sizes = {50, 50};
  spec.depths = {DepthSpec{}};
  spec.replications = 400;
  spec.seed = 17;
  const StudyRow r = run_study(spec).rows.at(0);
  CHECK(std::abs(r.rate - 0.05) < 3 * std::sqrt(0.05 * 0.95 / 400));
}

TEST_CASE("study specs from json", "[sim][study]") {
  const auto j = nlohmann::json::parse(R"({
    "models": [{"scenario": 1, "group": 1, "m": 51}, {"scenario": 1, "group": 2, "m": 51}],
    "group_sizes": [10, 12],
    "depths": ["ltr", "rp'", {"kind": "mbd", "band_order": 3}],
    "replications": 7, "seed": 3, "alpha": 0.1
  })");
  const StudySpec s = study_from_json(j);
  CHECK(s.models.size() == 2);
  CHECK(s.models[1].eigenvalues == std::vector<double>{3, 2, 1});
  CHECK(s.models[0].grid.size() == 51);
  CHECK(s.depths[1].kind == DepthKind::rp);
  CHECK(s.depths[1].use_derivatives);
  CHECK(s.depths[2].band_order == 3);
  CHECK(s.replications == 7);
  CHECK(s.alpha == 0.1);

  CHECK_THROWS_AS(study_from_json(nlohmann::json::parse(R"({"models": [], "group_sizes": []})")), InputError);
  auto empty = j;
  empty["models"] = nlohmann::json::array();
  empty["group_sizes"] = nlohmann::json::array();
  CHECK_THROWS_AS(study_from_json(empty), ParameterError);
  auto bad = j;
  bad["replications"] = 0;
  CHECK_THROWS_AS(study_from_json(bad), ParameterError);
  CHECK_THROWS_AS(depth_spec_from_json("tukey"), ParameterError);

  const StudyResult r{{StudyRow{"LTR", "eigen", "none", 0.0, 22, 0.5, 0.1, 7}}};
  CHECK(to_json(r).dump().find("\"rate\":0.5") != std::string::npos);
}
