#include "trace_shape/io.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "trace_shape/errors.hpp"

namespace trace_shape::io {

namespace {

constexpr const char* kModule = "cli";

[[noreturn]] void config_error(const std::string& message) {
  throw TraceError(ErrorKind::ConfigError, kModule, message);
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) config_error("unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(where + "." + key + ": " + e.what());
  }
}

Eigen::Vector2d vec2(const json& j, const std::string& key) {
  const auto v = get<std::vector<double>>(j, key, "field");
  if (v.size() != 2) config_error("field." + key + " must have two components");
  return {v[0], v[1]};
}

const char* family_name(FieldFamily f) {
  switch (f) {
    case FieldFamily::Translation:
      return "TRANSLATION";
    case FieldFamily::HoleNormal:
      return "HOLE_NORMAL";
    case FieldFamily::RadialBump:
      return "RADIAL_BUMP";
  }
  return "TRANSLATION";
}

}  // namespace

TraceProblem problem_from_json(const json& j) {
  reject_unknown(j, {"N", "p", "q", "R", "r", "center", "tolerances"}, "problem");
  TraceProblem p;
  if (j.contains("N")) p.N = get<int>(j, "N", "problem");
  if (j.contains("p")) p.p = get<double>(j, "p", "problem");
  if (j.contains("q")) p.q = get<double>(j, "q", "problem");
  if (j.contains("R")) p.R = get<double>(j, "R", "problem");
  if (j.contains("r")) p.r = get<double>(j, "r", "problem");
  if (j.contains("center")) p.center = get<std::vector<double>>(j, "center", "problem");
  p.tolerances = Tolerances::for_length(p.R - p.r);
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t,
                   {"solver_rel_tol", "residual_tol", "ode_tol", "fd_step_min", "fd_step_max", "max_iterations"},
                   "problem.tolerances");
    auto& tol = p.tolerances;
    if (t.contains("solver_rel_tol")) tol.solver_rel_tol = get<double>(t, "solver_rel_tol", "tolerances");
    if (t.contains("residual_tol")) tol.residual_tol = get<double>(t, "residual_tol", "tolerances");
    if (t.contains("ode_tol")) tol.ode_tol = get<double>(t, "ode_tol", "tolerances");
    if (t.contains("fd_step_min")) tol.fd_step_min = get<double>(t, "fd_step_min", "tolerances");
    if (t.contains("fd_step_max")) tol.fd_step_max = get<double>(t, "fd_step_max", "tolerances");
    if (t.contains("max_iterations")) tol.max_iterations = get<int>(t, "max_iterations", "tolerances");
  }
  return p;
}

json problem_to_json(const TraceProblem& p) {
  const auto& t = p.tolerances;
  return {{"N", p.N},
          {"p", p.p},
          {"q", p.q},
          {"R", p.R},
          {"r", p.r},
          {"center", p.center},
          {"tolerances",
           {{"solver_rel_tol", t.solver_rel_tol},
            {"residual_tol", t.residual_tol},
            {"ode_tol", t.ode_tol},
            {"fd_step_min", t.fd_step_min},
            {"fd_step_max", t.fd_step_max},
            {"max_iterations", t.max_iterations}}}};
}

FieldSpec field_spec_from_json(const json& j) {
  reject_unknown(j,
                 {"family", "direction", "bump_center", "bump_inner", "bump_outer", "plateau", "support",
                  "volume_preserving"},
                 "field");
  FieldSpec s;
  if (j.contains("family")) {
    const auto name = get<std::string>(j, "family", "field");
    if (name == "TRANSLATION") {
      s.family = FieldFamily::Translation;
    } else if (name == "HOLE_NORMAL") {
      s.family = FieldFamily::HoleNormal;
    } else if (name == "RADIAL_BUMP") {
      s.family = FieldFamily::RadialBump;
    } else {
      config_error("field.family must be TRANSLATION, HOLE_NORMAL or RADIAL_BUMP");
    }
  }
  if (j.contains("direction")) s.direction = vec2(j, "direction");
  if (j.contains("bump_center")) s.bump_center = vec2(j, "bump_center");
  if (j.contains("bump_inner")) s.bump_inner = get<double>(j, "bump_inner", "field");
  if (j.contains("bump_outer")) s.bump_outer = get<double>(j, "bump_outer", "field");
  if (j.contains("plateau")) s.plateau = get<double>(j, "plateau", "field");
  if (j.contains("support")) s.support = get<double>(j, "support", "field");
  if (j.contains("volume_preserving")) s.volume_preserving = get<bool>(j, "volume_preserving", "field");
  return s;
}

json field_spec_to_json(const FieldSpec& s) {
  json j = {{"family", family_name(s.family)},
            {"direction", {s.direction.x(), s.direction.y()}},
            {"volume_preserving", s.volume_preserving}};
  if (s.family == FieldFamily::RadialBump) {
    j["bump_center"] = {s.bump_center.x(), s.bump_center.y()};
    j["bump_inner"] = s.bump_inner;
    j["bump_outer"] = s.bump_outer;
  }
  if (s.plateau) j["plateau"] = *s.plateau;
  if (s.support) j["support"] = *s.support;
  return j;
}

json mesh_to_json(const Mesh2D& mesh) {
  json vertices = json::array(), triangles = json::array(), boundary = json::array();
  for (const auto& v : mesh.vertices) vertices.push_back({v.x(), v.y()});
  for (const auto& t : mesh.triangles) triangles.push_back({t[0], t[1], t[2]});
  for (const auto& e : mesh.boundary) {
    boundary.push_back({{"v", {e.v[0], e.v[1]}}, {"tag", e.tag == BoundaryTag::Hole ? "HOLE" : "OUTER"}});
  }
  return {{"vertices", vertices}, {"triangles", triangles}, {"boundary", boundary}};
}

Mesh2D mesh_from_json(const json& j) {
  reject_unknown(j, {"vertices", "triangles", "boundary", "config_hash"}, "mesh");
  Mesh2D mesh;
  try {
    for (const auto& v : j.at("vertices")) mesh.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    const int n = static_cast<int>(mesh.vertices.size());
    auto index = [n](const json& x) {
      const int i = x.get<int>();
      if (i < 0 || i >= n) config_error("mesh vertex index out of range");
      return i;
    };
    for (const auto& t : j.at("triangles")) mesh.triangles.push_back({index(t.at(0)), index(t.at(1)), index(t.at(2))});
    for (const auto& e : j.at("boundary")) {
      const auto tag = e.at("tag").get<std::string>();
      if (tag != "HOLE" && tag != "OUTER") config_error("boundary tag must be HOLE or OUTER");
      mesh.boundary.push_back(
          {{index(e.at("v").at(0)), index(e.at("v").at(1))}, tag == "HOLE" ? BoundaryTag::Hole : BoundaryTag::Outer});
    }
  } catch (const json::exception& e) {
    config_error(std::string("malformed mesh: ") + e.what());
  }
  return mesh;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceError(ErrorKind::IoError, kModule, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    config_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceError(ErrorKind::IoError, kModule, "cannot write " + path.string());
  out << text;
  if (!out) throw TraceError(ErrorKind::IoError, kModule, "failed writing " + path.string());
}

std::string config_hash(const json& resolved) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : resolved.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

std::string to_csv(const Table& table, const std::string& hash) {
  std::string out = "# config_hash=" + hash + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

json to_json(const Table& table, const std::string& hash) {
  return {{"config_hash", hash}, {"columns", table.columns}, {"rows", table.rows}};
}

}  // namespace trace_shape::io
