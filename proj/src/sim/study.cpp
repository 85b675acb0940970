#include <cmath>
#include <ostream>

#include "fkwc/error.hpp"
#include "fkwc/io.hpp"
#include "fkwc/parallel.hpp"
#include "fkwc/random.hpp"
#include "fkwc/rank_tests.hpp"
#include "fkwc/sim.hpp"

namespace fkwc::sim {

void StudySpec::validate() const {
  if (models.size() < 2) throw ParameterError("a study needs at least two groups");
  if (group_sizes.size() != models.size()) throw ParameterError("need one group size per model");
  if (depths.empty()) throw ParameterError("a study needs at least one depth");
  if (replications < 1) throw ParameterError("replications must be at least 1");
  for (const auto& m : models) m.validate();
  for (const auto& d : depths) d.validate();
  stats::TestConfig probe;
  probe.alpha = alpha;
  probe.percentile_r = percentile_r;
  probe.validate();
  if (sweep) {
    if (sweep->name != "alpha" && sweep->name != "beta" && sweep->name != "skew_shape") {
      throw ParameterError("sweep parameter must be alpha, beta or skew_shape, got '" + sweep->name + "'");
    }
    if (sweep->values.empty()) throw ParameterError("sweep needs at least one value");
    for (int g : sweep->groups) {
      if (g < 1 || g > static_cast<int>(models.size())) {
        throw ParameterError("sweep group " + std::to_string(g) + " does not exist");
      }
    }
  }
}

namespace {

std::vector<ProcessModel> apply_sweep(const StudySpec& spec, double value) {
  std::vector<ProcessModel> models = spec.models;
  if (!spec.sweep) return models;
  for (int g : spec.sweep->groups) {
    ProcessModel& m = models[static_cast<std::size_t>(g - 1)];
    if (spec.sweep->name == "alpha") m.alpha = value;
    else if (spec.sweep->name == "beta") m.beta = value;
    else m.skew_shape = value;
  }
  return models;
}

std::string family_label(const std::vector<ProcessModel>& models) {
  std::string out;
  for (const auto& m : models) {
    const std::string_view f = to_string(m.family);
    if (out.find(f) != std::string::npos) continue;
    if (!out.empty()) out += '/';
    out += f;
  }
  return out;
}

}  // namespace

StudyResult run_study(const StudySpec& spec) {
  spec.validate();
  const std::vector<double> points = spec.sweep ? spec.sweep->values : std::vector<double>{0.0};
  const std::size_t R = spec.replications;
  const std::size_t D = spec.depths.size();
  std::size_t total = 0;
  for (std::size_t n : spec.group_sizes) total += n;

  StudyResult result;
  for (double value : points) {
    const std::vector<ProcessModel> models = apply_sweep(spec, value);
    for (const auto& m : models) m.validate();
    std::vector<unsigned char> reject(R * D, 0);
    parallel_for(R, [&](std::size_t r) {
      const FunctionalDataset ds =
          generate_groups(models, spec.group_sizes, derive_seed(spec.seed, {stream::replicate, r}));
      for (std::size_t d = 0; d < D; ++d) {
        stats::TestConfig config;
        config.depth = spec.depths[d];
        config.depth.rng_seed = derive_seed(spec.depths[d].rng_seed ^ spec.seed, {stream::replicate, r});
        config.alpha = spec.alpha;
        config.percentile_r = spec.percentile_r;
        reject[r * D + d] = stats::fkwc_test(ds, config).reject ? 1 : 0;
      }
    });
    for (std::size_t d = 0; d < D; ++d) {
      std::size_t count = 0;
      for (std::size_t r = 0; r < R; ++r) count += reject[r * D + d];
      StudyRow row;
      row.depth = spec.depths[d].name();
      row.family = family_label(models);
      row.param_name = spec.sweep ? spec.sweep->name : "none";
      row.param_value = value;
      row.n = total;
      row.replications = R;
      row.rate = static_cast<double>(count) / static_cast<double>(R);
      row.se = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(R));
      result.rows.push_back(row);
    }
  }
  return result;
}

void write_study_csv(std::ostream& out, const StudyResult& result) {
  out << "depth,family,param_name,param_value,N,rate,se,R\n";
  for (const auto& r : result.rows) {
    out << r.depth << ',' << r.family << ',' << r.param_name << ',' << io::format_double(r.param_value)
        << ',' << r.n << ',' << io::format_double(r.rate) << ',' << io::format_double(r.se) << ','
        << r.replications << '\n';
  }
}

nlohmann::json to_json(const StudyResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"depth", r.depth},
                    {"family", r.family},
                    {"param_name", r.param_name},
                    {"param_value", r.param_value},
                    {"N", r.n},
                    {"rate", r.rate},
                    {"se", r.se},
                    {"R", r.replications}});
  }
  return {{"rows", rows}};
}

ProcessModel model_from_json(const nlohmann::json& j) {
  try {
    ProcessModel m;
    const std::size_t points = j.value("m", std::size_t{101});
    m.grid = Grid(points);
    if (j.contains("scenario")) {
      m = scenario_model(j.at("scenario").get<int>(), j.value("group", 1), m.grid);
      return m;
    }
    m.family = parse_family(j.value("family", std::string("gaussian")));
    m.alpha = j.value("alpha", m.alpha);
    m.beta = j.value("beta", m.beta);
    m.skew_shape = j.value("skew_shape", m.skew_shape);
    if (j.contains("eigenvalues")) m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed process model: ") + e.what());
  }
}

DepthSpec depth_spec_from_json(const nlohmann::json& j) {
  try {
    DepthSpec d;
    if (j.is_string()) {
      std::string name = j.get<std::string>();
      if (!name.empty() && name.back() == '\'') {
        d.use_derivatives = true;
        name.pop_back();
      }
      d.kind = parse_depth_kind(name);
      return d;
    }
    d.kind = parse_depth_kind(j.at("kind").get<std::string>());
    d.use_derivatives = j.value("derivatives", false);
    d.num_projections = j.value("projections", d.num_projections);
    d.band_order = j.value("band_order", d.band_order);
    if (j.contains("weights")) d.channel_weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("bandwidth")) d.kernel_bandwidth = j.at("bandwidth").get<double>();
    d.rng_seed = j.value("seed", d.rng_seed);
    d.validate();
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed depth spec: ") + e.what());
  }
}

StudySpec study_from_json(const nlohmann::json& j) {
  try {
    StudySpec s;
    for (const auto& m : j.at("models")) s.models.push_back(model_from_json(m));
    s.group_sizes = j.at("group_sizes").get<std::vector<std::size_t>>();
    for (const auto& d : j.at("depths")) s.depths.push_back(depth_spec_from_json(d));
    s.alpha = j.value("alpha", s.alpha);
    if (j.contains("r")) s.percentile_r = j.at("r").get<double>();
    s.replications = j.value("replications", s.replications);
    s.seed = j.value("seed", s.seed);
    if (j.contains("sweep")) {
      const auto& w = j.at("sweep");
      Sweep sw;
      sw.name = w.at("name").get<std::string>();
      sw.values = w.at("values").get<std::vector<double>>();
      if (w.contains("groups")) sw.groups = w.at("groups").get<std::vector<int>>();
      s.sweep = sw;
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed study spec: ") + e.what());
  }
}

}  // namespace fkwc::sim
