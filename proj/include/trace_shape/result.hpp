#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "trace_shape/mesh2d.hpp"

namespace trace_shape {

/// Piecewise-linear radial function on r = s_0 < s_1 < ... < s_M = R.
struct RadialProfile {
  std::vector<double> nodes;
  std::vector<double> values;
};

/// Nodal P1 function on a Mesh2D; zero on HOLE vertices.
struct ScalarField {
  std::shared_ptr<const Mesh2D> mesh;
  std::vector<double> values;
};

/// Outcome of a trace-constant solve. The extremal is nonnegative with unit
/// q-norm on the outer boundary, so multiplier == constant.
struct TraceResult {
  double constant = 0.0;
  double multiplier = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::variant<RadialProfile, ScalarField> extremal;

  const RadialProfile& profile() const { return std::get<RadialProfile>(extremal); }
  const ScalarField& field() const { return std::get<ScalarField>(extremal); }
};

}  // namespace trace_shape
