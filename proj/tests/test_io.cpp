#include <filesystem>
#include <string>

#include "doctest.h"
#include "trace_shape/errors.hpp"
#include "trace_shape/io.hpp"

using namespace trace_shape;
using io::json;

namespace {

ValidatedProblem annulus() {
  TraceProblem raw;
  raw.q = 1.5;
  raw.center = {0.1, -0.05};
  return validate_problem(raw);
}

}  // namespace

TEST_CASE("mesh JSON round trip is exact") {
  const Mesh2D mesh = generate_annular_mesh(annulus(), 8, 32);
  const Mesh2D back = io::mesh_from_json(json::parse(io::mesh_to_json(mesh).dump()));
  REQUIRE(back.vertices.size() == mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) CHECK(back.vertices[i] == mesh.vertices[i]);
  CHECK(back.triangles == mesh.triangles);
  REQUIRE(back.boundary.size() == mesh.boundary.size());
  for (std::size_t i = 0; i < mesh.boundary.size(); ++i) {
    CHECK(back.boundary[i].v == mesh.boundary[i].v);
    CHECK(back.boundary[i].tag == mesh.boundary[i].tag);
  }
}

TEST_CASE("problem JSON round trip and unknown keys") {
  const TraceProblem p = io::problem_from_json(json{{"p", 2.5}, {"q", 1.7}, {"r", 0.5}, {"R", 3.0}});
  const TraceProblem back = io::problem_from_json(io::problem_to_json(p));
  CHECK(back.p == p.p);
  CHECK(back.q == p.q);
  CHECK(back.R == p.R);
  CHECK(io::problem_to_json(back) == io::problem_to_json(p));
  try {
    io::problem_from_json(json{{"p", 2.0}, {"radius", 1.0}});
    FAIL("unknown key accepted");
  } catch (const TraceError& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
  }
}

TEST_CASE("field spec JSON round trip") {
  FieldSpec spec;
  spec.family = FieldFamily::RadialBump;
  spec.direction = {0.6, 0.8};
  spec.bump_center = {1.0, 0.0};
  spec.bump_inner = 0.1;
  spec.bump_outer = 0.2;
  spec.volume_preserving = true;
  const json j = io::field_spec_to_json(spec);
  CHECK(io::field_spec_to_json(io::field_spec_from_json(j)) == j);
  CHECK_THROWS_AS(io::field_spec_from_json(json{{"family", "SWIRL"}}), TraceError);
}

TEST_CASE("hash and table formats") {
  const json a = {{"x", 1}, {"y", {1.5, 2.5}}};
  const std::string h = io::config_hash(a);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(h == io::config_hash(json::parse(a.dump())));
  CHECK(h != io::config_hash(json{{"x", 2}, {"y", {1.5, 2.5}}}));

  CHECK(std::stod(io::format_number(0.1)) == 0.1);
  CHECK(std::stod(io::format_number(1.0 / 3.0)) == 1.0 / 3.0);

  const io::Table t{{"a", "b"}, {{1.0, 0.5}, {2.0, -0.25}}};
  const std::string csv = io::to_csv(t, h);
  CHECK(csv == "# config_hash=" + h + "\na,b\n1,0.5\n2,-0.25\n");
  const json tj = io::to_json(t, h);
  CHECK(tj.at("config_hash") == h);
  CHECK(tj.at("rows").size() == 2);
}

TEST_CASE("file errors are reported as IoError") {
  try {
    io::read_json_file("/nonexistent/config.json");
    FAIL("missing file accepted");
  } catch (const TraceError& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
}
