#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "trace_shape/cli.hpp"
#include "trace_shape/io.hpp"

using namespace trace_shape;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("trace_shape_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

}  // namespace

TEST_CASE("parse errors exit 2") {
  CHECK(run({}) == 2);
  CHECK(run({"no-such-command"}) == 2);
  CHECK(run({"radial", "--format", "xml"}) == 2);
  CHECK(run({"radial", "--threads", "0"}) == 2);
  CHECK(run({"radial", "--config", "/nonexistent.json"}) == 2);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("config validation exits 2") {
  TempDir tmp;
  auto write = [&](const std::string& body) {
    const fs::path p = tmp.path / "cfg.json";
    io::write_text_file(p, body);
    return p.string();
  };
  const std::string out = (tmp.path / "out").string();
  CHECK(run({"radial", "--config", write(R"({"problem":{"p":2,"q":2},"extra":1})"), "--out", out}) == 2);
  CHECK(run({"radial", "--config", write(R"({"radial":{"M":64,"bogus":1}})"), "--out", out}) == 2);
  CHECK(run({"radial", "--config", write(R"({"solve2d":{}})"), "--out", out}) == 2);
  CHECK(run({"radial", "--config", write(R"({"problem":{"r":2,"R":1}})"), "--out", out}) == 2);
  CHECK(run({"radial", "--config", write(R"({"problem":)"), "--out", out}) == 2);
}

TEST_CASE("radial runs are deterministic and carry the config hash") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "cfg.json";
  io::write_text_file(cfg, R"({"problem":{"q":1.5},"radial":{"M":128,"random_init":true},"seed":7})");
  REQUIRE(run({"radial", "--config", cfg.string(), "--out", (tmp.path / "a").string()}) == 0);
  REQUIRE(run({"radial", "--config", cfg.string(), "--out", (tmp.path / "b").string(), "--threads", "1"}) == 0);
  const std::string a = slurp(tmp.path / "a" / "radial.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(tmp.path / "b" / "radial.csv"));
  CHECK(a.rfind("# config_hash=", 0) == 0);

  // a different seed changes the hash line
  REQUIRE(run({"radial", "--config", cfg.string(), "--out", (tmp.path / "c").string(), "--seed", "8"}) == 0);
  const std::string c = slurp(tmp.path / "c" / "radial.csv");
  CHECK(c.substr(0, c.find('\n')) != a.substr(0, a.find('\n')));
}

TEST_CASE("threshold at large R approaches p") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "cfg.json";
  io::write_text_file(cfg, R"({"problem":{"p":2,"q":2},"threshold":{"R_min":1.01,"R_max":100}})");
  REQUIRE(run({"threshold", "--config", cfg.string(), "--out", tmp.path.string(), "--format", "json"}) == 0);
  const auto j = io::read_json_file(tmp.path / "threshold.json");
  const auto& cols = j.at("columns");
  REQUIRE(cols.size() == 3);
  CHECK(cols[2] == "Q");
  const auto& last = j.at("rows").back();
  CHECK(last[0].get<double>() == doctest::Approx(100.0));
  CHECK(std::abs(last[2].get<double>() - 2.0) < 0.05);
  CHECK(j.at("rows").front()[2].get<double>() < 1.0);
}

TEST_CASE("solve2d writes the field and the mesh") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "cfg.json";
  io::write_text_file(cfg, R"({"problem":{"center":[0.1,0]},"solve2d":{"layers":8,"angular":32}})");
  REQUIRE(run({"solve2d", "--config", cfg.string(), "--out", tmp.path.string()}) == 0);
  const Mesh2D mesh = io::mesh_from_json(io::read_json_file(tmp.path / "mesh.json"));
  CHECK(mesh.vertices.size() == 9 * 32);
  std::ifstream in(tmp.path / "solve2d.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2 + 9 * 32);
}
