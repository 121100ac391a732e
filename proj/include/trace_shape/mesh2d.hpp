#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "trace_shape/deformation.hpp"
#include "trace_shape/problem.hpp"

namespace trace_shape {

enum class BoundaryTag { Hole, Outer };

struct BoundaryEdge {
  std::array<int, 2> v;
  BoundaryTag tag;
};

/// Triangulation of B_R minus a circular hole. Triangles are counterclockwise.
struct Mesh2D {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary;

  double signed_area(std::size_t t) const;
  double min_signed_area() const;
  double min_angle_degrees() const;
  double min_edge_length() const;
  /// 1 for vertices on a HOLE edge.
  std::vector<char> hole_vertices() const;
  /// V - E + F; zero for an annulus.
  long euler_characteristic() const;
};

/// Structured layered mesh: layers + 1 rings interpolating matched angular
/// samples of the hole circle and the outer circle, radially graded toward the
/// hole so that centered rings sit at r (R/r)^{k/layers}. Each quad is split
/// along the diagonal with the larger minimum angle; ties (every quad of a
/// centered mesh) follow a per-quadrant pattern, which makes a centered mesh
/// symmetric under both axis reflections and quarter turns when angular is a
/// multiple of 8, and keeps meshes for centers +-t e1 mirror images.
///
/// Throws GeometryInvalid for N != 2, layers < 2 or angular < 8 and
/// QualityFailure when the smallest angle drops below 10 degrees.
Mesh2D generate_annular_mesh(const ValidatedProblem& problem, int layers, int angular);

/// Moves every vertex x to x + t V(x). Throws MeshInverted when a triangle
/// loses positive area.
Mesh2D transport_mesh(const Mesh2D& mesh, const DeformationField& field, double t);

}  // namespace trace_shape
