// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 run all criteria
//   acceptance --criterion N   run only criterion N
// Exit status is non-zero when any selected criterion fails.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "fkwc/depth.hpp"
#include "fkwc/depth_kernels.hpp"
#include "fkwc/power.hpp"
#include "fkwc/rank_tests.hpp"
#include "fkwc/sim.hpp"
#include "oracles.hpp"

using namespace fkwc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

sim::ProcessModel gp(double alpha = 0.05, double beta = 1.0) {
  sim::ProcessModel m;
  m.alpha = alpha;
  m.beta = beta;
  return m;
}

std::vector<DepthSpec> specs(std::initializer_list<std::pair<DepthKind, bool>> list) {
  std::vector<DepthSpec> out;
  for (auto [k, d] : list) {
    DepthSpec s;
    s.kind = k;
    s.use_derivatives = d;
    out.push_back(s);
  }
  return out;
}

sim::StudyResult study(const std::vector<sim::ProcessModel>& models, std::size_t n_per_group,
                       std::vector<DepthSpec> depths, std::size_t reps, std::uint64_t seed) {
  sim::StudySpec s;
  s.models = models;
  s.group_sizes.assign(models.size(), n_per_group);
  s.depths = std::move(depths);
  s.replications = reps;
  s.seed = seed;
  return sim::run_study(s);
}

// --- 1 ---------------------------------------------------------------------
Outcome percentile_identity() {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int J = 2 + static_cast<int>(rng() % 3);
    const std::size_t n = static_cast<std::size_t>(J) + rng() % 200;
    std::vector<std::size_t> ranks(n);
    std::iota(ranks.begin(), ranks.end(), std::size_t{1});
    std::shuffle(ranks.begin(), ranks.end(), rng);
    // Random split: every group gets one observation, the rest are labelled at random.
    std::vector<int> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = i < static_cast<std::size_t>(J) ? static_cast<int>(i) + 1 : 1 + static_cast<int>(rng() % J);
    }
    std::shuffle(g.begin(), g.end(), rng);
    const double w = stats::kw_statistic(ranks, g);
    const double m = stats::percentile_statistic(ranks, g, 1.0);
    worst = std::max(worst, std::abs(m - w));
  }
  return {worst < 1e-10, "max |M_1 - W| = " + fmt(worst, 3)};
}

// --- 2 ---------------------------------------------------------------------
Outcome null_calibration() {
  const FunctionalDataset ds = sim::generate_groups({gp(), gp(), gp()}, {50, 50, 50}, 2001);
  DepthSpec spec;
  spec.kind = DepthKind::mbd;
  const RankVector rv = depth_ranks(ds, spec);
  std::vector<int> labels = ds.groups();
  std::mt19937_64 rng(2002);
  std::vector<double> w(2000);
  for (double& v : w) {
    std::shuffle(labels.begin(), labels.end(), rng);
    v = stats::kw_statistic(rv.ranks, labels);
  }
  std::sort(w.begin(), w.end());
  double ks = 0.0;
  const auto n = static_cast<double>(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double f = 1.0 - std::exp(-w[i] / 2.0);
    ks = std::max({ks, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {ks < 0.05, "KS distance to chi2_2 = " + fmt(ks)};
}

Outcome rates_within(const sim::StudyResult& r, double lo, double hi) {
  Outcome o;
  for (const auto& row : r.rows) {
    const bool ok = row.rate >= lo && row.rate <= hi;
    o.pass = o.pass && ok;
    o.detail += row.depth + "=" + fmt(row.rate, 3) + (ok ? "" : "(!)") + " ";
  }
  o.detail += "(want [" + fmt(lo) + ", " + fmt(hi) + "])";
  return o;
}

// --- 3 ---------------------------------------------------------------------
Outcome gaussian_size() {
  const auto r = study({gp(), gp()}, 50,
                       specs({{DepthKind::ltr, false}, {DepthKind::rp, false}, {DepthKind::mbd, false},
                              {DepthKind::mfhd, false}}),
                       500, 3001);
  return rates_within(r, 0.02, 0.09);
}

// --- 4 ---------------------------------------------------------------------
Outcome t1_size() {
  sim::ProcessModel t = gp();
  t.family = sim::Family::student_t1;
  std::vector<DepthSpec> all;
  for (DepthKind k : {DepthKind::ltr, DepthKind::rp, DepthKind::mfhd, DepthKind::mbd, DepthKind::spatial,
                      DepthKind::ksd}) {
    for (bool d : {false, true}) all.push_back(specs({{k, d}})[0]);
  }
  return rates_within(study({t, t}, 50, all, 500, 4001), 0.02, 0.10);
}

// --- 5 ---------------------------------------------------------------------
Outcome scenario5_power() {
  const auto r = study({sim::scenario_model(5, 1), sim::scenario_model(5, 2)}, 100,
                       specs({{DepthKind::ltr, false}, {DepthKind::rp, true}}), 200, 5001);
  return rates_within(r, 0.95, 1.0);
}

// --- 6 ---------------------------------------------------------------------
Outcome scenario1_blind_spot() {
  const auto r = study({sim::scenario_model(1, 1), sim::scenario_model(1, 2)}, 100,
                       specs({{DepthKind::ltr, true}, {DepthKind::rp, true}}), 200, 6001);
  const auto& ltr = r.rows.at(0);
  const auto& rp = r.rows.at(1);
  const bool a = ltr.rate <= 0.15;
  const bool b = rp.rate >= 0.90;
  return {a && b, ltr.depth + "=" + fmt(ltr.rate, 3) + (a ? "" : "(!)") + " (want <= 0.15), " + rp.depth + "=" +
                      fmt(rp.rate, 3) + (b ? "" : "(!)") + " (want >= 0.90)"};
}

// --- 7 ---------------------------------------------------------------------
Outcome ltr_properties() {
  const Grid g(101);
  Outcome o;
  std::vector<std::string> notes;
  const CurveMatrix b = sim::gen_gp(gp(0.2), 1, 7003);

  // (1) rank invariance under x -> a x + b, checked for constant and curve a.
  bool constant_ok = true, curve_ok = true;
  std::size_t curve_mismatch = 0, curve_samples = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const CurveMatrix x = sim::gen_gp(gp(0.1), 40, 7100 + s);
    const FunctionalDataset ds(g, x, std::vector<int>(40, 1));
    const auto base = ranks_from_values(ltr_depth(ds).values, 0).ranks;
    for (double a : {-2.5, 0.01, 3.0}) {
      CurveMatrix y = a * x;
      y.rowwise() += b.row(0);
      constant_ok = constant_ok && ranks_from_values(ltr_depth(FunctionalDataset(g, y, ds.groups())).values, 0).ranks == base;
    }
    CurveMatrix y = x;
    for (Eigen::Index t = 0; t < y.cols(); ++t) {
      y.col(t) *= 1.0 + 0.5 * std::sin(2 * std::numbers::pi * g.point(static_cast<std::size_t>(t)));
    }
    y.rowwise() += b.row(0);
    const bool same = ranks_from_values(ltr_depth(FunctionalDataset(g, y, ds.groups())).values, 0).ranks == base;
    curve_ok = curve_ok && same;
    curve_mismatch += same ? 0 : 1;
    ++curve_samples;
  }
  notes.push_back(std::string("(1) constant a ") + (constant_ok ? "ok" : "FAIL") + ", curve a(t) " +
                  (curve_ok ? "ok" : "FAIL on " + std::to_string(curve_mismatch) + "/" + std::to_string(curve_samples) + " samples"));

  // (2) zero is deepest under sign symmetry; (3) decreasing in c; (4) vanishes.
  const CurveMatrix f = sim::gen_gp(gp(0.1), 30, 7200);
  CurveMatrix sym(60, 101);
  sym.topRows(30) = f;
  sym.bottomRows(30) = -f;
  const CurveMatrix zero = CurveMatrix::Zero(1, 101);
  const double at_zero = kernels::ltr_from_channels({kernels::mean_squared_distance(zero, sym, g)})[0];
  const auto sample_depths = kernels::ltr_from_channels({kernels::mean_squared_distance(sym, sym, g)});
  const CurveMatrix probes = sim::gen_gp(gp(0.1), 200, 7201);
  const auto probe_depths = kernels::ltr_from_channels({kernels::mean_squared_distance(probes, sym, g)});
  bool p2 = true;
  for (double d : sample_depths) p2 = p2 && d < at_zero;
  for (double d : probe_depths) p2 = p2 && d < at_zero;

  bool p3 = true, p4 = true;
  for (Eigen::Index i = 0; i < 10; ++i) {
    double prev = at_zero;
    for (double c = 0.05; c <= 100.0; c *= 1.25) {
      const CurveMatrix q = c * probes.row(i);
      const double d = kernels::ltr_from_channels({kernels::mean_squared_distance(q, sym, g)})[0];
      p3 = p3 && d < prev;
      prev = d;
    }
    const CurveMatrix far = 1e6 * probes.row(i);
    p4 = p4 && kernels::ltr_from_channels({kernels::mean_squared_distance(far, sym, g)})[0] < 1e-4;
  }
  notes.push_back(std::string("(2) ") + (p2 ? "ok" : "FAIL"));
  notes.push_back(std::string("(3) ") + (p3 ? "ok" : "FAIL"));
  notes.push_back(std::string("(4) ") + (p4 ? "ok" : "FAIL"));
  o.pass = constant_ok && curve_ok && p2 && p3 && p4;
  for (const auto& n : notes) o.detail += n + "; ";
  return o;
}

// --- 8 ---------------------------------------------------------------------
Outcome scale_invariance() {
  const Grid g(101);
  Outcome o;
  for (std::uint64_t s = 0; s < 5; ++s) {
    sim::ProcessModel t = gp();
    if (s % 2 == 1) t.family = sim::Family::student_t1;
    const FunctionalDataset ds = sim::generate_groups({t, t}, {50, 50}, 8000 + s);
    CurveMatrix y = ds.curves();
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      y.col(c) *= 1.0 + 0.5 * std::sin(2 * std::numbers::pi * g.point(static_cast<std::size_t>(c)));
    }
    const FunctionalDataset scaled(g, y, ds.groups());
    const FunctionalDataset seven(g, 7.0 * ds.curves(), ds.groups());
    for (DepthKind k : {DepthKind::mfhd, DepthKind::mbd, DepthKind::rp}) {
      DepthSpec spec;
      spec.kind = k;
      spec.rng_seed = 8100 + s;
      const bool plain = depth_ranks(ds, spec).ranks == depth_ranks(scaled, spec).ranks;
      spec.use_derivatives = true;
      const bool primed = depth_ranks(ds, spec).ranks == depth_ranks(seven, spec).ranks;
      if (!plain) o.detail += "a(t) breaks " + DepthSpec{k}.name() + " (sample " + std::to_string(s) + "); ";
      if (!primed) o.detail += "c=7 breaks " + spec.name() + " (sample " + std::to_string(s) + "); ";
      o.pass = o.pass && plain && primed;
    }
  }
  if (o.pass) o.detail = "MFHD/MBD/RP20 under a(t), MFHD'/MBD'/RP20' under c=7: identical ranks on 5 samples";
  return o;
}

// --- 9 ---------------------------------------------------------------------
Outcome local_alternative() {
  const double n = 500.0;
  sim::ProcessModel m1;
  m1.family = sim::Family::eigen;
  m1.eigenvalues.assign(5, 1.0);
  sim::ProcessModel m2 = m1;
  m2.eigenvalues.assign(5, 1.0 + 5.0 / std::sqrt(n));
  const auto r = study({m1, m2}, 250, specs({{DepthKind::ltr, false}}), 2000, 9001);
  const double rate = r.rows.at(0).rate;

  // ||X||^2 is chi-squared with 5 degrees of freedom under H0 (scale does not matter for Delta_G).
  const auto chi2_5 = [](double z) {
    return z <= 0.0 ? 0.0 : std::pow(z, 1.5) * std::exp(-z / 2) / (std::pow(2.0, 2.5) * std::tgamma(2.5));
  };
  power::LocalAlternativeSpec spec{{0.0, 5.0}, {0.5, 0.5}, power::Density::analytic(chi2_5, 0.0, 200.0, 200001)};
  const double tau = power::local_tau(spec);
  const double predicted = power::predicted_power(tau, 2, 0.05, n).predicted_power;
  const double diff = std::abs(predicted - rate);
  return {diff <= 0.05, "Delta_G=" + fmt(spec.density.delta_g()) + " tau=" + fmt(tau) + " predicted=" +
                            fmt(predicted) + " MC=" + fmt(rate) + " |diff|=" + fmt(diff, 3) + " (want <= 0.05)"};
}

// --- 10 --------------------------------------------------------------------
Outcome oracle_equivalences() {
  std::mt19937_64 rng(10001);
  std::size_t mbd_bad = 0, mbd_cases = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 2 + rng() % 5;
    const std::size_t m = 3 + rng() % 4;
    const Grid g(m);
    CurveMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<double>(rng() % 5);
    const auto got = kernels::modified_band(x, x, g, 2);
    const double pairs = static_cast<double>(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
      double expect = 0.0;
      for (std::size_t t = 0; t < m; ++t) {
        std::vector<double> col(n);
        for (std::size_t j = 0; j < n; ++j) col[j] = x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(t));
        expect += g.weights()[t] * (static_cast<double>(oracle::mbd_pair_count(col, col[i])) / pairs);
      }
      ++mbd_cases;
      if (got[i] != expect) ++mbd_bad;
    }
  }

  std::size_t tukey_bad = 0, tukey_cases = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng() % 50;
    const int span = rep % 3 == 0 ? 5 : 61;
    std::vector<kernels::Point2> pts(n);
    std::vector<oracle::P2> opts(n);
    auto coord = [&] { return static_cast<double>(static_cast<int>(rng() % span) - span / 2); };
    for (std::size_t i = 0; i < n; ++i) {
      pts[i] = {coord(), coord()};
      opts[i] = {pts[i].x, pts[i].y};
    }
    for (int q = 0; q < 4; ++q) {
      const kernels::Point2 query = q < 2 ? pts[rng() % n] : kernels::Point2{coord(), coord()};
      ++tukey_cases;
      if (kernels::halfspace_count(query, pts) != oracle::tukey_count({query.x, query.y}, opts)) ++tukey_bad;
    }
  }

  double ncx2_worst = 0.0;
  for (double df = 1; df <= 6; df += 1) {
    for (double tau = 0.5; tau <= 20.0; tau += 2.5) {
      for (double x = 0.5; x <= 40.0; x += 2.5) {
        ncx2_worst = std::max(ncx2_worst, std::abs(power::noncentral_chisq_sf(x, df, tau) -
                                                   oracle::ncx2_sf_by_integration(x, df, tau)));
      }
    }
  }
  return {mbd_bad == 0 && tukey_bad == 0 && ncx2_worst < 1e-6,
          "MBD mismatches " + std::to_string(mbd_bad) + "/" + std::to_string(mbd_cases) + ", Tukey mismatches " +
              std::to_string(tukey_bad) + "/" + std::to_string(tukey_cases) + ", ncx2 max error " + fmt(ncx2_worst, 3)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FKWC acceptance suite"};
  int only = 0;
  app.add_option("--criterion,-c", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "percentile statistic with r = 1 equals W", 5, percentile_identity},
      {2, "permutation null of W is chi-squared (N=150, J=3)", 60, null_calibration},
      {3, "empirical size, Gaussian process, N_j=50, R=500", 600, gaussian_size},
      {4, "empirical size, t1 process, all depths, N_j=50, R=500", 600, t1_size},
      {5, "power, scenario 5, N_j=100, R=200", 300, scenario5_power},
      {6, "trace-equal blind spot, scenario 1, N_j=100, R=200", 300, scenario1_blind_spot},
      {7, "LTR depth properties", 1, ltr_properties},
      {8, "scale invariance of depth ranks", 10, scale_invariance},
      {9, "local alternative power vs Monte Carlo, N=500, R=2000", 900, local_alternative},
      {10, "oracle equivalences (MBD, Tukey, noncentral chi-squared)", 60, oracle_equivalences},
  };

  bool ok = true;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.time_limit_s;
    const bool pass = o.pass && in_time;
    ok = ok && pass;
    std::cout << "criterion " << std::setw(2) << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << c.title
              << " | " << o.detail << " | " << fmt(secs, 3) << " s" << (in_time ? "" : " (over time limit)")
              << std::endl;
  }
  return ok ? 0 : 1;
}
