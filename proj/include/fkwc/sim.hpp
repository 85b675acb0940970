#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fkwc/dataset.hpp"
#include "fkwc/depth.hpp"

namespace fkwc::sim {

enum class Family { gaussian, student_t1, skew_gaussian, eigen };

std::string_view to_string(Family f);
/// Accepts gaussian, t1, skew_gaussian, eigen.
Family parse_family(std::string_view name);

/// Zero-mean process on a grid. The squared-exponential families use
/// (alpha, beta); the eigen family uses `eigenvalues` on the Fourier basis
/// 1, sqrt2 sin(2 pi t), sqrt2 cos(2 pi t), sqrt2 sin(4 pi t), ...
struct ProcessModel {
  Family family = Family::gaussian;
  double alpha = 0.05;
  double beta = 1.0;
  double skew_shape = 4.0;
  std::vector<double> eigenvalues;
  Grid grid{101};

  void validate() const;
};

/// beta * exp(−(s − t)^2 / (2 alpha^2)).
double se_kernel(double s, double t, double alpha, double beta);
Eigen::MatrixXd kernel_matrix(const Grid& grid, double alpha, double beta);

/// Lower Cholesky factor of the kernel matrix. Jitter of 1e-10, 1e-8 and
/// 1e-6 times beta is added to the diagonal in turn until the factorization
/// succeeds; NumericalError afterwards.
Eigen::MatrixXd kernel_cholesky(const Grid& grid, double alpha, double beta);

/// Fourier basis functions 1..k evaluated on the grid, one per row.
CurveMatrix fourier_basis(const Grid& grid, std::size_t k);

/// Eigenvalues of the six finite-dimensional scenarios; group is 1 or 2.
std::vector<double> scenario_eigenvalues(int scenario, int group);
ProcessModel scenario_model(int scenario, int group, const Grid& grid = Grid(101));

// Generators return n curves (rows). Each is deterministic in `seed`.
CurveMatrix gen_gp(const ProcessModel& model, std::size_t n, std::uint64_t seed);
CurveMatrix gen_t1(const ProcessModel& model, std::size_t n, std::uint64_t seed);
CurveMatrix gen_skew_gp(const ProcessModel& model, std::size_t n, std::uint64_t seed);
CurveMatrix gen_eigen(const ProcessModel& model, std::size_t n, std::uint64_t seed);
/// Dispatches on model.family.
CurveMatrix generate(const ProcessModel& model, std::size_t n, std::uint64_t seed);

/// One dataset with group g drawn from models[g − 1]; group g uses the
/// stream (seed, g).
FunctionalDataset generate_groups(const std::vector<ProcessModel>& models,
                                  const std::vector<std::size_t>& sizes, std::uint64_t seed);

/// A parameter sweep: `values` are substituted into `name` of the models
/// listed in `groups` (alpha, beta or skew_shape).
struct Sweep {
  std::string name;
  std::vector<double> values;
  std::vector<int> groups{2};
};

struct StudySpec {
  std::vector<ProcessModel> models;
  std::vector<std::size_t> group_sizes;
  std::vector<DepthSpec> depths;
  double alpha = 0.05;
  std::optional<double> percentile_r;
  std::size_t replications = 200;
  std::uint64_t seed = 1;
  std::optional<Sweep> sweep;

  void validate() const;
};

struct StudyRow {
  std::string depth;
  std::string family;
  std::string param_name;
  double param_value = 0.0;
  std::size_t n = 0;
  double rate = 0.0;
  double se = 0.0;
  std::size_t replications = 0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
};

/// Replicated FKWC tests. Replicate r draws its data from the streams
/// (seed, r, group), so results never depend on the thread count.
StudyResult run_study(const StudySpec& spec);

void write_study_csv(std::ostream& out, const StudyResult& result);
nlohmann::json to_json(const StudyResult& result);

ProcessModel model_from_json(const nlohmann::json& j);
DepthSpec depth_spec_from_json(const nlohmann::json& j);
StudySpec study_from_json(const nlohmann::json& j);

}  // namespace fkwc::sim
