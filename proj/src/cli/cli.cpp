#include "fkwc/cli.hpp"

#include <CLI11.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fkwc/depth.hpp"
#include "fkwc/error.hpp"
#include "fkwc/io.hpp"
#include "fkwc/parallel.hpp"
#include "fkwc/power.hpp"
#include "fkwc/random.hpp"
#include "fkwc/rank_tests.hpp"
#include "fkwc/sim.hpp"

namespace fkwc::cli {

namespace {

using nlohmann::json;

struct CommonOptions {
  std::string input;
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct DepthOptions {
  std::string depth = "rp";
  bool primed = false;
  std::size_t projections = 20;
  std::size_t band_order = 2;
  std::vector<double> weights{0.5, 0.5};
  std::optional<double> bandwidth;
  std::string derivatives = "finite-diff";
  bool center = false;
};

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out << "  ";
      out << std::setw(static_cast<int>(width[c])) << (c == 0 ? std::left : std::right) << cells[c];
    }
    out << std::right << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& r : rows) line(r);
}

void add_common(CLI::App* app, CommonOptions& c, bool input_required, const std::string& input_help,
                const std::string& default_format) {
  c.format = default_format;
  auto* in = app->add_option("--input,-i", c.input, input_help);
  if (input_required) in->required();
  app->add_option("--output,-o", c.output, "Write results to this file instead of stdout");
  app->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"json", "table", "csv"}))
      ->capture_default_str();
  app->add_option("--seed", c.seed, "Seed for projections, tie breaking and simulation")
      ->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads (0 = all hardware threads)")
      ->capture_default_str();
}

void add_depth(CLI::App* app, DepthOptions& d) {
  app->add_option("--depth,-d", d.depth, "Depth function")
      ->check(CLI::IsMember({"ltr", "rp", "mfhd", "mbd", "spatial", "ksd"}))
      ->capture_default_str();
  app->add_flag("--primed", d.primed, "Include first derivatives (LTR', RP', MFHD', MBD', SD', KSD')");
  app->add_option("--projections", d.projections, "Number of random projections (rp)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--band-order", d.band_order, "Largest band size (mbd)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}))
      ->capture_default_str();
  app->add_option("--weights", d.weights, "Curve and derivative channel weights (mbd, spatial, ksd)")
      ->expected(2)
      ->capture_default_str();
  app->add_option("--bandwidth", d.bandwidth, "Gaussian kernel width for ksd (default: median heuristic)");
  app->add_option("--derivatives", d.derivatives,
                  "Derivative source for primed depths: finite-diff or file=PATH")
      ->capture_default_str();
  app->add_flag("--center", d.center, "Center every group by its deepest curve before testing");
}

DepthSpec make_spec(const DepthOptions& d, std::uint64_t seed) {
  DepthSpec spec;
  spec.kind = parse_depth_kind(d.depth);
  spec.use_derivatives = d.primed;
  spec.num_projections = d.projections;
  spec.band_order = d.band_order;
  spec.channel_weights = d.weights;
  spec.kernel_bandwidth = d.bandwidth;
  spec.rng_seed = seed;
  spec.validate();
  return spec;
}

FunctionalDataset load(const CommonOptions& c, const DepthOptions& d, const DepthSpec& spec) {
  FunctionalDataset ds = io::load_dataset(c.input, io::format_from_path(c.input));
  if (d.derivatives.rfind("file=", 0) == 0) {
    const std::string path = d.derivatives.substr(5);
    std::ifstream in(path);
    if (!in) throw InputError("cannot open derivative file '" + path + "'");
    ds = io::attach_derivatives_csv(ds, in);
  } else if (d.derivatives != "finite-diff") {
    throw ParameterError("--derivatives must be finite-diff or file=PATH, got '" + d.derivatives + "'");
  }
  if (d.center) ds = center_by_deepest(ds, spec);
  return ds;
}

// Writes to --output when given, otherwise to `out`.
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

private:
  std::ofstream file_;
  std::ostream* stream_;
};

json test_json(const stats::TestResult& r, const std::optional<double>& pr) {
  json j = {{"statistic_kind", r.kind == stats::StatisticKind::percentile ? "M_r" : "W"},
            {"statistic", r.statistic},
            {"df", r.df},
            {"p_value", r.p_value},
            {"alpha", r.alpha},
            {"reject", r.reject},
            {"N", r.n},
            {"group_sizes", r.group_sizes},
            {"group_mean_ranks", r.group_mean_ranks},
            {"group_deviations", r.group_deviations},
            {"tie_breaks_applied", r.tie_breaks_applied},
            {"depth", r.depth_name},
            {"warnings", r.warnings}};
  if (pr) j["r"] = *pr;
  return j;
}

int cmd_test(const CommonOptions& c, const DepthOptions& d, double alpha, std::optional<double> r,
             std::ostream& out, std::ostream& err) {
  stats::TestConfig config;
  config.depth = make_spec(d, c.seed);
  config.alpha = alpha;
  config.percentile_r = r;
  config.validate();
  const FunctionalDataset ds = load(c, d, config.depth);
  const stats::TestResult res = stats::fkwc_test(ds, config);
  for (const auto& w : res.warnings) err << "warning: " << w << '\n';

  Sink sink(c.output, out);
  if (c.format == "json") {
    *sink << test_json(res, r).dump(2) << '\n';
  } else if (c.format == "csv") {
    *sink << "group,n,mean_rank,deviation\n";
    for (std::size_t j = 0; j < res.group_sizes.size(); ++j) {
      *sink << j + 1 << ',' << res.group_sizes[j] << ',' << io::format_double(res.group_mean_ranks[j])
            << ',' << io::format_double(res.group_deviations[j]) << '\n';
    }
    *sink << "# statistic=" << io::format_double(res.statistic) << " df=" << res.df
          << " p_value=" << io::format_double(res.p_value) << " reject=" << (res.reject ? 1 : 0) << '\n';
  } else {
    *sink << "FKWC test (" << res.depth_name << " ranks, "
          << (res.kind == stats::StatisticKind::percentile ? "percentile M_r, r = " + num(*r) : std::string("W"))
          << ")\n";
    *sink << "  statistic  " << num(res.statistic) << "\n  df         " << res.df << "\n  p-value    "
          << num(res.p_value) << "\n  decision   " << (res.reject ? "reject" : "do not reject")
          << " at alpha = " << num(res.alpha) << "\n\n";
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < res.group_sizes.size(); ++j) {
      rows.push_back({std::to_string(j + 1), std::to_string(res.group_sizes[j]),
                      num(res.group_mean_ranks[j]), num(res.group_deviations[j])});
    }
    print_table(*sink, {"group", "n", "mean rank", "deviation"}, rows);
  }
  return res.reject ? exit_rejected : exit_ok;
}

int cmd_mc(const CommonOptions& c, const DepthOptions& d, double alpha, const std::string& correction,
           std::optional<std::size_t> comparisons, std::ostream& out, std::ostream& err) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  const DepthSpec spec = make_spec(d, c.seed);
  const stats::Correction corr = stats::parse_correction(correction);
  const FunctionalDataset ds = load(c, d, spec);
  const stats::MCResult res = stats::steel_mc(ds, spec, comparisons, corr);
  for (const auto& w : res.warnings) err << "warning: " << w << '\n';

  const auto J = static_cast<std::size_t>(res.raw_p.rows());
  bool any = false;
  std::vector<std::vector<std::string>> rows;
  json pairs = json::array();
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t k = j + 1; k < J; ++k) {
      const double raw = res.raw_p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      const double adj = res.adjusted_p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      const bool sig = adj < alpha;
      any = any || sig;
      pairs.push_back({{"group_a", j + 1}, {"group_b", k + 1}, {"raw_p", raw}, {"adjusted_p", adj},
                       {"significant", sig}});
      rows.push_back({std::to_string(j + 1) + "-" + std::to_string(k + 1), num(raw), num(adj),
                      sig ? "*" : ""});
    }
  }
  auto matrix = [](const Eigen::MatrixXd& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::vector<double> row(m.row(i).begin(), m.row(i).end());
      a.push_back(row);
    }
    return a;
  };

  Sink sink(c.output, out);
  if (c.format == "json") {
    json j = {{"depth", res.depth_name},
              {"correction", stats::to_string(res.correction)},
              {"num_comparisons", res.num_comparisons},
              {"alpha", alpha},
              {"pairs", pairs},
              {"raw_p", matrix(res.raw_p)},
              {"adjusted_p", matrix(res.adjusted_p)},
              {"warnings", res.warnings}};
    *sink << j.dump(2) << '\n';
  } else if (c.format == "csv") {
    *sink << "group_a,group_b,raw_p,adjusted_p,significant\n";
    for (const auto& p : pairs) {
      *sink << p["group_a"].get<std::size_t>() << ',' << p["group_b"].get<std::size_t>() << ','
            << io::format_double(p["raw_p"].get<double>()) << ','
            << io::format_double(p["adjusted_p"].get<double>()) << ','
            << (p["significant"].get<bool>() ? 1 : 0) << '\n';
    }
  } else {
    *sink << "Pairwise rank-sum comparisons (" << res.depth_name << " depths, "
          << stats::to_string(res.correction) << " over " << res.num_comparisons << " tests)\n\n";
    print_table(*sink, {"pair", "raw p", "adjusted p", "sig"}, rows);
  }
  return any ? exit_rejected : exit_ok;
}

power::Density density_from_json(const json& j, std::uint64_t seed) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "exponential") {
    const double rate = j.value("rate", 1.0);
    if (!(rate > 0.0)) throw ParameterError("exponential rate must be positive");
    return power::Density::analytic([rate](double z) { return rate * std::exp(-rate * z); }, 0.0,
                                    60.0 / rate);
  }
  if (type == "chi_squared") {
    const double df = j.at("df").get<double>();
    const double scale = j.value("scale", 1.0);
    if (!(df >= 2.0)) throw ParameterError("chi_squared density needs df >= 2 (bounded density)");
    if (!(scale > 0.0)) throw ParameterError("chi_squared scale must be positive");
    const boost::math::chi_squared_distribution<double> chi(df);
    const double hi = scale * (df + 60.0 * std::sqrt(2.0 * df) + 60.0);
    return power::Density::analytic(
        [&](double z) { return boost::math::pdf(chi, z / scale) / scale; }, 0.0, hi);
  }
  if (type == "samples") {
    const auto v = j.at("values").get<std::vector<double>>();
    return power::Density::histogram(v);
  }
  if (type == "histogram") {
    const sim::ProcessModel model = sim::model_from_json(j.at("model"));
    const std::size_t draws = j.value("draws", std::size_t{20000});
    const CurveMatrix x = sim::generate(model, draws, seed);
    std::vector<double> sq(draws);
    for (std::size_t i = 0; i < draws; ++i) {
      const auto row = row_span(x, static_cast<Eigen::Index>(i));
      sq[i] = inner_product(row, row, model.grid);
    }
    return power::Density::histogram(sq);
  }
  throw ParameterError("unknown density type '" + type +
                       "' (expected exponential, chi_squared, samples or histogram)");
}

int cmd_power(const CommonOptions& c, std::optional<double> alpha_flag, std::ostream& out) {
  std::ifstream in(c.input);
  if (!in) throw InputError("cannot open '" + c.input + "'");
  json spec;
  try {
    spec = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + c.input + "': " + e.what());
  }

  json result;
  try {
    const double alpha = alpha_flag.value_or(spec.value("alpha", 0.05));
    std::optional<double> target;
    if (spec.contains("target_power")) target = spec.at("target_power").get<double>();
    std::vector<double> thetas;
    if (spec.contains("thetas")) thetas = spec.at("thetas").get<std::vector<double>>();

    std::optional<Eigen::MatrixXd> probs;
    power::PowerResult pr;
    if (spec.contains("tau")) {
      pr = power::predicted_power(spec.at("tau").get<double>(), spec.value("J", std::size_t{2}), alpha,
                                  spec.value("N", 0.0));
    } else if (spec.contains("deltas")) {
      power::LocalAlternativeSpec la;
      la.deltas = spec.at("deltas").get<std::vector<double>>();
      la.thetas = thetas;
      la.density = density_from_json(spec.at("density"), c.seed);
      result["delta_g"] = la.density.delta_g();
      pr = power::predicted_power(power::local_tau(la), la.deltas.size(), alpha, spec.value("N", 0.0));
    } else {
      Eigen::MatrixXd p;
      if (spec.contains("probs")) {
        const auto rows = spec.at("probs").get<std::vector<std::vector<double>>>();
        p.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
        for (std::size_t a = 0; a < rows.size(); ++a) {
          if (rows[a].size() != rows.size()) throw InputError("probs must be a square matrix");
          for (std::size_t b = 0; b < rows.size(); ++b) {
            p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = rows[a][b];
          }
        }
      } else if (spec.contains("models")) {
        std::vector<sim::ProcessModel> models;
        for (const auto& m : spec.at("models")) models.push_back(sim::model_from_json(m));
        const int order = spec.value("p", 0);
        const std::size_t reps = spec.value("reps", std::size_t{10000});
        const auto J = static_cast<Eigen::Index>(models.size());
        p = Eigen::MatrixXd::Constant(J, J, 0.5);
        json se = json::array();
        for (Eigen::Index a = 0; a < J; ++a) {
          for (Eigen::Index b = a + 1; b < J; ++b) {
            const auto est = power::mc_rank_prob(models[static_cast<std::size_t>(a)],
                                                 models[static_cast<std::size_t>(b)], order, reps,
                                                 derive_seed(c.seed, {static_cast<std::uint64_t>(a),
                                                                      static_cast<std::uint64_t>(b)}));
            p(a, b) = est.estimate;
            p(b, a) = 1.0 - est.estimate;
            se.push_back({{"j", a + 1}, {"k", b + 1}, {"estimate", est.estimate}, {"std_error", est.std_error}});
          }
        }
        result["rank_prob_estimates"] = se;
      } else {
        throw InputError("power spec needs one of: tau, deltas (with density), probs, models");
      }
      if (thetas.empty()) thetas.assign(static_cast<std::size_t>(p.rows()), 1.0 / static_cast<double>(p.rows()));
      const double n = spec.value("N", 0.0);
      if (n > 0.0) {
        pr = power::predicted_power(p, thetas, n, alpha);
      } else if (!target) {
        throw InputError("power spec with probs or models needs N or target_power");
      }
      probs = p;
      if (target) {
        const auto ss = power::required_sample_size(*target, p, thetas, alpha);
        result["sample_size"] = {{"target_power", *target}, {"feasible", ss.feasible}, {"N", ss.n},
                                 {"power", ss.power}};
        if (!ss.feasible) result["sample_size"]["message"] = ss.message;
        if (!(n > 0.0)) pr = power::predicted_power(p, thetas, static_cast<double>(ss.n), alpha);
      }
    }
    result["tau"] = pr.tau;
    result["predicted_power"] = pr.predicted_power;
    result["alpha"] = pr.alpha;
    result["J"] = pr.J;
    result["N"] = pr.N;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed power spec: ") + e.what());
  }

  Sink sink(c.output, out);
  if (c.format == "json") {
    *sink << result.dump(2) << '\n';
  } else if (c.format == "csv") {
    *sink << "tau,predicted_power,alpha,J,N\n"
          << io::format_double(result["tau"].get<double>()) << ','
          << io::format_double(result["predicted_power"].get<double>()) << ','
          << io::format_double(result["alpha"].get<double>()) << ',' << result["J"].get<std::size_t>()
          << ',' << io::format_double(result["N"].get<double>()) << '\n';
  } else {
    std::vector<std::vector<std::string>> rows = {
        {"tau", num(result["tau"].get<double>())},
        {"predicted power", num(result["predicted_power"].get<double>())},
        {"alpha", num(result["alpha"].get<double>())},
        {"J", std::to_string(result["J"].get<std::size_t>())},
        {"N", num(result["N"].get<double>())}};
    if (result.contains("sample_size")) {
      rows.push_back({"required N", std::to_string(result["sample_size"]["N"].get<std::size_t>())});
      rows.push_back({"feasible", result["sample_size"]["feasible"].get<bool>() ? "yes" : "no"});
    }
    print_table(*sink, {"quantity", "value"}, rows);
  }
  return exit_ok;
}

int cmd_simulate(const CommonOptions& c, bool seed_given, std::optional<std::size_t> reps,
                 std::ostream& out) {
  std::ifstream in(c.input);
  if (!in) throw InputError("cannot open '" + c.input + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + c.input + "': " + e.what());
  }
  sim::StudySpec spec = sim::study_from_json(j);
  if (seed_given) spec.seed = c.seed;
  if (reps) spec.replications = *reps;
  const sim::StudyResult res = sim::run_study(spec);

  Sink sink(c.output, out);
  if (c.format == "csv") {
    sim::write_study_csv(*sink, res);
  } else if (c.format == "json") {
    *sink << sim::to_json(res).dump(2) << '\n';
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : res.rows) {
      rows.push_back({r.depth, r.family, r.param_name, num(r.param_value), std::to_string(r.n),
                      num(r.rate), num(r.se), std::to_string(r.replications)});
    }
    print_table(*sink, {"depth", "family", "param", "value", "N", "rate", "se", "R"}, rows);
  }
  return exit_ok;
}

int cmd_depth(const CommonOptions& c, const DepthOptions& d, std::ostream& out) {
  const DepthSpec spec = make_spec(d, c.seed);
  const FunctionalDataset ds = load(c, d, spec);
  const DepthVector dv = compute_depth(ds, spec);
  const RankVector rv = depth_ranks(ds, spec);
  Sink sink(c.output, out);
  if (c.format == "csv") {
    io::write_depth_csv(*sink, ds, dv, rv);
  } else if (c.format == "json") {
    *sink << io::depth_to_json(ds, dv, rv).dump(2) << '\n';
  } else {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      rows.push_back({std::to_string(i), std::to_string(ds.group(i)), num(dv.values[i]),
                      std::to_string(rv.ranks[i])});
    }
    print_table(*sink, {"index", "group", spec.name() + " depth", "rank"}, rows);
  }
  return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Depth-based Kruskal-Wallis tests for equality of covariance operators of functional data",
               "fkwc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  CommonOptions test_c, mc_c, power_c, sim_c, depth_c;
  DepthOptions test_d, mc_d, depth_d;
  double test_alpha = 0.05, mc_alpha = 0.05;
  std::optional<double> r, power_alpha;
  std::string correction = "sidak";
  std::optional<std::size_t> comparisons, replications;

  auto* test = app.add_subcommand("test", "Run the FKWC test on a dataset (exit 2 when H0 is rejected)");
  add_common(test, test_c, true, "Dataset (wide CSV, or .json)", "json");
  add_depth(test, test_d);
  test->add_option("--alpha", test_alpha, "Significance level")->capture_default_str();
  test->add_option("--r", r, "Use the percentile statistic built from the least deep fraction r in (0, 1]");

  auto* mc = app.add_subcommand("mc", "Pairwise rank-sum comparisons on pairwise depths (exit 2 if any pair is significant)");
  add_common(mc, mc_c, true, "Dataset (wide CSV, or .json)", "json");
  add_depth(mc, mc_d);
  mc->add_option("--alpha", mc_alpha, "Level used to flag significant pairs")->capture_default_str();
  mc->add_option("--correction", correction, "Multiple testing correction")
      ->check(CLI::IsMember({"sidak", "bonferroni", "holm"}))
      ->capture_default_str();
  mc->add_option("--comparisons", comparisons, "Number of tests to correct for (default J(J-1)/2)");

  auto* pw = app.add_subcommand("power", "Predicted power and sample size from a JSON power spec");
  add_common(pw, power_c, true, "Power spec (JSON)", "json");
  pw->add_option("--alpha", power_alpha, "Significance level (overrides the spec)");

  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo size/power study from a JSON study spec");
  add_common(simulate, sim_c, true, "Study spec (JSON)", "csv");
  simulate->add_option("--replications", replications, "Replications (overrides the spec)");

  auto* depth = app.add_subcommand("depth", "Per-curve depth values and ranks of the pooled sample");
  add_common(depth, depth_c, true, "Dataset (wide CSV, or .json)", "csv");
  add_depth(depth, depth_d);

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? exit_ok : exit_parameter_error;
    }
    auto threads = [](const CommonOptions& c) {
      if (c.threads > 0) set_thread_count(c.threads);
    };
    if (test->parsed()) {
      threads(test_c);
      return cmd_test(test_c, test_d, test_alpha, r, out, err);
    }
    if (mc->parsed()) {
      threads(mc_c);
      return cmd_mc(mc_c, mc_d, mc_alpha, correction, comparisons, out, err);
    }
    if (pw->parsed()) {
      threads(power_c);
      return cmd_power(power_c, power_alpha, out);
    }
    if (simulate->parsed()) {
      threads(sim_c);
      return cmd_simulate(sim_c, simulate->count("--seed") > 0, replications, out);
    }
    threads(depth_c);
    return cmd_depth(depth_c, depth_d, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return exit_input_error;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return exit_parameter_error;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return exit_numerical_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numerical_error;
  }
}

}  // namespace fkwc::cli
