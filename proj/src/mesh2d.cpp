#include "trace_shape/mesh2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include "trace_shape/errors.hpp"

namespace trace_shape {

namespace {

constexpr const char* kModule = "mesh2d";
constexpr double kMinAngleDegrees = 10.0;

double angle_at(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const Eigen::Vector2d u = b - a, v = c - a;
  return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
}

double triangle_min_angle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return std::min({angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
}

}  // namespace

double Mesh2D::signed_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Eigen::Vector2d& a = vertices[static_cast<std::size_t>(tri[0])];
  const Eigen::Vector2d& b = vertices[static_cast<std::size_t>(tri[1])];
  const Eigen::Vector2d& c = vertices[static_cast<std::size_t>(tri[2])];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double Mesh2D::min_signed_area() const {
  double out = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < triangles.size(); ++t) out = std::min(out, signed_area(t));
  return out;
}

double Mesh2D::min_angle_degrees() const {
  double out = 180.0;
  for (const auto& tri : triangles) {
    const auto& a = vertices[static_cast<std::size_t>(tri[0])];
    const auto& b = vertices[static_cast<std::size_t>(tri[1])];
    const auto& c = vertices[static_cast<std::size_t>(tri[2])];
    out = std::min({out, angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
  }
  return out * 180.0 / std::numbers::pi;
}

double Mesh2D::min_edge_length() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      const auto& a = vertices[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)])];
      const auto& b = vertices[static_cast<std::size_t>(tri[static_cast<std::size_t>((k + 1) % 3)])];
      out = std::min(out, (a - b).norm());
    }
  }
  return out;
}

std::vector<char> Mesh2D::hole_vertices() const {
  std::vector<char> mask(vertices.size(), 0);
  for (const auto& e : boundary) {
    if (e.tag == BoundaryTag::Hole) {
      mask[static_cast<std::size_t>(e.v[0])] = 1;
      mask[static_cast<std::size_t>(e.v[1])] = 1;
    }
  }
  return mask;
}

long Mesh2D::euler_characteristic() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = tri[static_cast<std::size_t>(k)], b = tri[static_cast<std::size_t>((k + 1) % 3)];
      if (a > b) std::swap(a, b);
      edges.emplace(a, b);
    }
  }
  return static_cast<long>(vertices.size()) - static_cast<long>(edges.size()) + static_cast<long>(triangles.size());
}

Mesh2D generate_annular_mesh(const ValidatedProblem& problem, int layers, int angular) {
  if (problem.N() != 2) throw TraceError(ErrorKind::GeometryInvalid, kModule, "meshes are 2-D only");
  if (layers < 2 || angular < 8) {
    throw TraceError(ErrorKind::GeometryInvalid, kModule, "need layers >= 2 and angular >= 8");
  }
  const double r = problem.r(), R = problem.R();
  const Eigen::Vector2d c(problem.center()[0], problem.center()[1]);

  Mesh2D mesh;
  const auto n = static_cast<std::size_t>(angular);
  mesh.vertices.reserve((static_cast<std::size_t>(layers) + 1) * n);
  for (int k = 0; k <= layers; ++k) {
    // centered rings at r (R/r)^{k/layers}
    double t = (r * std::pow(R / r, static_cast<double>(k) / layers) - r) / (R - r);
    if (k == 0) t = 0.0;
    if (k == layers) t = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / angular;
      const Eigen::Vector2d dir(std::cos(theta), std::sin(theta));
      const Eigen::Vector2d h = c + r * dir;
      const Eigen::Vector2d o = R * dir;
      if (k == 0) {
        mesh.vertices.push_back(h);
      } else if (k == layers) {
        mesh.vertices.push_back(o);
      } else {
        mesh.vertices.push_back((1.0 - t) * h + t * o);
      }
    }
  }

  auto vid = [&](int k, std::size_t j) { return static_cast<int>(static_cast<std::size_t>(k) * n + j % n); };
  const std::size_t quarter = std::max<std::size_t>(n / 4, 1);
  mesh.triangles.reserve(2 * static_cast<std::size_t>(layers) * n);
  for (int k = 0; k < layers; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const int a = vid(k, j), b = vid(k + 1, j), cc = vid(k + 1, j + 1), d = vid(k, j + 1);
      auto at = [&](int v) -> const Eigen::Vector2d& { return mesh.vertices[static_cast<std::size_t>(v)]; };
      // take the diagonal with the larger minimum angle; on (near) ties, which
      // include every quad of a centered mesh, flip halfway through each quadrant
      const double q_ac = std::min(triangle_min_angle(at(a), at(b), at(cc)), triangle_min_angle(at(a), at(cc), at(d)));
      const double q_bd = std::min(triangle_min_angle(at(a), at(b), at(d)), triangle_min_angle(at(b), at(cc), at(d)));
      const bool tie = std::abs(q_ac - q_bd) <= 1e-9 * (q_ac + q_bd);
      if (tie ? 2 * (j % quarter) < quarter : q_ac > q_bd) {
        mesh.triangles.push_back({a, b, cc});
        mesh.triangles.push_back({a, cc, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, cc, d});
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) mesh.boundary.push_back({{vid(0, j), vid(0, j + 1)}, BoundaryTag::Hole});
  for (std::size_t j = 0; j < n; ++j) {
    mesh.boundary.push_back({{vid(layers, j), vid(layers, j + 1)}, BoundaryTag::Outer});
  }

  if (!(mesh.min_signed_area() > 0.0)) {
    throw TraceError(ErrorKind::GeometryInvalid, kModule, "hole too close to the outer boundary for this grading");
  }
  const double min_angle = mesh.min_angle_degrees();
  if (min_angle < kMinAngleDegrees) {
    throw TraceError(ErrorKind::QualityFailure, kModule,
                     "minimum angle " + std::to_string(min_angle) + " degrees is below 10");
  }
  return mesh;
}

Mesh2D transport_mesh(const Mesh2D& mesh, const DeformationField& field, double t) {
  Mesh2D moved = mesh;
  if (t == 0.0) return moved;
  for (auto& x : moved.vertices) x = x + t * field.value(x);
  const double min_area = moved.min_signed_area();
  if (!(min_area > 0.0)) {
    throw TraceError(ErrorKind::MeshInverted, kModule,
                     "transport by t = " + std::to_string(t) + " inverts a triangle");
  }
  return moved;
}

}  // namespace trace_shape
