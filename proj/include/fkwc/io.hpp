#pragma once

#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>

#include "fkwc/dataset.hpp"
#include "fkwc/depth.hpp"

namespace fkwc::io {

enum class DatasetFormat { csv, json };

/// Picks the format from the file extension (".json" → json, anything else → csv).
DatasetFormat format_from_path(const std::filesystem::path& path);

/// Wide CSV: header `group,t_0,...,t_{m-1}`, then one row per curve holding
/// the integer group label followed by m values. Errors name the offending
/// line and column.
FunctionalDataset read_csv(std::istream& in);
void write_csv(std::ostream& out, const FunctionalDataset& ds);

/// Derivative curves stored in the same wide CSV shape; labels must match `ds`.
FunctionalDataset attach_derivatives_csv(const FunctionalDataset& ds, std::istream& in);

nlohmann::json to_json(const FunctionalDataset& ds);
FunctionalDataset from_json(const nlohmann::json& j);

FunctionalDataset load_dataset(const std::filesystem::path& path,
                               DatasetFormat format = DatasetFormat::csv);
FunctionalDataset load_dataset(const std::filesystem::path& path, const std::string& format);
void save_csv(const std::filesystem::path& path, const FunctionalDataset& ds);
void save_json(const std::filesystem::path& path, const FunctionalDataset& ds);

/// Per-curve depth table with columns index, group, depth, rank (index is 0-based).
void write_depth_csv(std::ostream& out, const FunctionalDataset& ds, const DepthVector& depth,
                     const RankVector& ranks);
nlohmann::json depth_to_json(const FunctionalDataset& ds, const DepthVector& depth,
                             const RankVector& ranks);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace fkwc::io
