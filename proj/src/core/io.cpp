#include "fkwc/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "fkwc/error.hpp"

namespace fkwc::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

double parse_double(std::string_view cell, std::size_t line, std::size_t column) {
  double v = 0.0;
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw InputError(where(line, column) + ": '" + std::string(cell) + "' is not a number");
  }
  if (!std::isfinite(v)) {
    throw InputError(where(line, column) + ": value is not finite");
  }
  return v;
}

int parse_label(std::string_view cell, std::size_t line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw InputError(where(line, 1) + ": group label '" + std::string(cell) +
                     "' is not an integer");
  }
  if (v < 1) {
    throw InputError(where(line, 1) + ": group label " + std::to_string(v) +
                     " is unknown; labels must be positive integers 1..J");
  }
  return v;
}

struct WideTable {
  std::vector<double> header;
  std::vector<int> labels;
  std::vector<double> values;
};

WideTable read_wide(std::istream& in) {
  WideTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (t.header.empty()) {
      if (fields.front() != "group") {
        throw InputError(where(line_no, 1) + ": header must start with 'group'");
      }
      if (fields.size() < 4) {
        throw InputError(where(line_no, fields.size()) +
                         ": header needs at least 3 grid points after 'group'");
      }
      for (std::size_t c = 1; c < fields.size(); ++c) {
        t.header.push_back(parse_double(fields[c], line_no, c + 1));
      }
      continue;
    }
    if (fields.size() != t.header.size() + 1) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(t.header.size() + 1) + " columns, found " +
                       std::to_string(fields.size()) + " (ragged row)");
    }
    t.labels.push_back(parse_label(fields[0], line_no));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      t.values.push_back(parse_double(fields[c], line_no, c + 1));
    }
  }
  if (t.header.empty()) throw InputError("CSV input is empty");
  if (t.labels.empty()) throw InputError("CSV input has a header but no curves");
  return t;
}

CurveMatrix to_matrix(const WideTable& t) {
  const auto n = static_cast<Eigen::Index>(t.labels.size());
  const auto m = static_cast<Eigen::Index>(t.header.size());
  return Eigen::Map<const CurveMatrix>(t.values.data(), n, m);
}

void write_wide(std::ostream& out, const Grid& grid, const std::vector<int>& labels,
                const CurveMatrix& x) {
  out << "group";
  for (double p : grid.points()) out << ',' << format_double(p);
  out << '\n';
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out << labels[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < x.cols(); ++k) out << ',' << format_double(x(i, k));
    out << '\n';
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

DatasetFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? DatasetFormat::json : DatasetFormat::csv;
}

FunctionalDataset read_csv(std::istream& in) {
  const WideTable t = read_wide(in);
  Grid grid = Grid::from_points(t.header);
  return FunctionalDataset(std::move(grid), to_matrix(t), t.labels);
}

void write_csv(std::ostream& out, const FunctionalDataset& ds) {
  write_wide(out, ds.grid(), ds.groups(), ds.curves());
}

FunctionalDataset attach_derivatives_csv(const FunctionalDataset& ds, std::istream& in) {
  const WideTable t = read_wide(in);
  if (t.header.size() != ds.grid().size()) {
    throw InputError("derivative file has " + std::to_string(t.header.size()) +
                     " grid points; the dataset has " + std::to_string(ds.grid().size()));
  }
  (void)Grid::from_points(t.header);
  if (t.labels != ds.groups()) {
    throw InputError("derivative file rows must carry the same group labels, in the same order, "
                     "as the dataset");
  }
  return ds.with_derivatives(to_matrix(t));
}

nlohmann::json to_json(const FunctionalDataset& ds) {
  auto rows = [](const CurveMatrix& x) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      arr.push_back(std::vector<double>(x.row(i).begin(), x.row(i).end()));
    }
    return arr;
  };
  nlohmann::json j;
  j["grid"] = std::vector<double>(ds.grid().points().begin(), ds.grid().points().end());
  j["groups"] = ds.groups();
  j["curves"] = rows(ds.curves());
  if (ds.has_derivatives()) j["derivatives"] = rows(ds.derivatives());
  return j;
}

FunctionalDataset from_json(const nlohmann::json& j) {
  try {
    const auto points = j.at("grid").get<std::vector<double>>();
    Grid grid = Grid::from_points(points);
    const auto groups = j.at("groups").get<std::vector<int>>();
    auto read_rows = [&](const nlohmann::json& arr, const char* what) {
      CurveMatrix x(static_cast<Eigen::Index>(arr.size()), static_cast<Eigen::Index>(grid.size()));
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto row = arr[i].get<std::vector<double>>();
        if (row.size() != grid.size()) {
          throw InputError(std::string(what) + " " + std::to_string(i) + " has " +
                           std::to_string(row.size()) + " values; expected " +
                           std::to_string(grid.size()));
        }
        std::copy(row.begin(), row.end(), x.data() + static_cast<Eigen::Index>(i) * x.cols());
      }
      return x;
    };
    std::optional<CurveMatrix> d;
    if (j.contains("derivatives")) d = read_rows(j.at("derivatives"), "derivative");
    return FunctionalDataset(std::move(grid), read_rows(j.at("curves"), "curve"), groups, std::move(d));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed dataset JSON: ") + e.what());
  }
}

FunctionalDataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  auto in = open_input(path);
  if (format == DatasetFormat::json) {
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError("'" + path.string() + "': " + e.what());
    }
  }
  return read_csv(in);
}

FunctionalDataset load_dataset(const std::filesystem::path& path, const std::string& format) {
  if (format == "csv") return load_dataset(path, DatasetFormat::csv);
  if (format == "json") return load_dataset(path, DatasetFormat::json);
  throw ParameterError("unknown dataset format '" + format + "' (expected csv or json)");
}

void save_csv(const std::filesystem::path& path, const FunctionalDataset& ds) {
  auto out = open_output(path);
  write_csv(out, ds);
}

void save_json(const std::filesystem::path& path, const FunctionalDataset& ds) {
  auto out = open_output(path);
  out << to_json(ds).dump() << '\n';
}

void write_depth_csv(std::ostream& out, const FunctionalDataset& ds, const DepthVector& depth,
                     const RankVector& ranks) {
  if (depth.values.size() != ds.size() || ranks.ranks.size() != ds.size()) {
    throw DimensionError("depth and rank vectors must have one entry per curve");
  }
  out << "index,group,depth,rank\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << i << ',' << ds.group(i) << ',' << format_double(depth.values[i]) << ','
        << ranks.ranks[i] << '\n';
  }
}

nlohmann::json depth_to_json(const FunctionalDataset& ds, const DepthVector& depth,
                             const RankVector& ranks) {
  if (depth.values.size() != ds.size() || ranks.ranks.size() != ds.size()) {
    throw DimensionError("depth and rank vectors must have one entry per curve");
  }
  return {{"depth", depth.spec.name()},
          {"groups", ds.groups()},
          {"values", depth.values},
          {"ranks", ranks.ranks},
          {"tie_breaks_applied", ranks.tie_breaks_applied}};
}

}  // namespace fkwc::io
