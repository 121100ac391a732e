#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "trace_shape/deformation.hpp"
#include "trace_shape/mesh2d.hpp"
#include "trace_shape/problem.hpp"

namespace trace_shape::io {

using nlohmann::json;

/// {"N","p","q","R","r","center","tolerances"}; unknown keys throw ConfigError.
/// Missing finite-difference steps default to {1e-3, 4e-3} (R - r).
TraceProblem problem_from_json(const json& j);
json problem_to_json(const TraceProblem& problem);

/// {"family": "TRANSLATION" | "HOLE_NORMAL" | "RADIAL_BUMP", "direction",
///  "bump_center", "bump_inner", "bump_outer", "plateau", "support",
///  "volume_preserving"}
FieldSpec field_spec_from_json(const json& j);
json field_spec_to_json(const FieldSpec& spec);

json mesh_to_json(const Mesh2D& mesh);
Mesh2D mesh_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// 16 hex digits of FNV-1a (64-bit) over the compact dump of a JSON value.
std::string config_hash(const json& resolved);

/// Numeric table serialized as CSV (17 significant digits, a leading
/// "# config_hash=..." line) or as JSON {"config_hash","columns","rows"}.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
std::string format_number(double value);
std::string to_csv(const Table& table, const std::string& hash);
json to_json(const Table& table, const std::string& hash);

}  // namespace trace_shape::io
