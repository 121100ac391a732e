#pragma once

#include <memory>
#include <vector>

#include "trace_shape/deformation.hpp"
#include "trace_shape/fem2d.hpp"

namespace trace_shape {

struct ShapeDerivative {
  double boundary_form = 0.0;
  double volume_form = 0.0;
};

/// First variation of S_q under the flow of V, for a normalized nonnegative
/// 2-D extremal. The boundary form is
///   -(p - 1) * sum over HOLE edges of |du/dnu|^p <V(mid), nu> |e|
/// with the gradient of the adjacent triangle; the volume form is
///   int (|grad u|^p + |u|^p) div V - p |grad u|^{p-2} <grad u, V' grad u>
/// with V and V' at triangle centroids. Throws NotNormalized when the OUTER
/// trace q-norm is not 1 or the field has negative values.
ShapeDerivative shape_derivative(const TraceResult& result, const DeformationField& field, double p, double q);

/// Serial reference of shape_derivative.
ShapeDerivative shape_derivative_serial(const TraceResult& result, const DeformationField& field, double p,
                                        double q);

struct FiniteDifferenceReport {
  double slope = 0.0;                     // Richardson-extrapolated central difference
  double value_at_zero = 0.0;             // S_q on the untransported mesh
  std::vector<double> steps;              // decreasing t > 0
  std::vector<double> central;            // (S(t) - S(-t)) / 2t per step
  std::vector<double> one_sided;          // (S(t) - S(0)) / t per step
  std::vector<std::array<double, 2>> table;  // (t, S_q) for every solve, t ascending
};

/// Solves S_q on transport_mesh(mesh, V, +-t) for each step, warm-started from
/// the t = 0 extremal, and extrapolates the central slope. Steps default to
/// the problem's fd_step_max, then halving down to fd_step_min.
FiniteDifferenceReport finite_difference_slope(const ValidatedProblem& problem, std::shared_ptr<const Mesh2D> mesh,
                                               const DeformationField& field, std::vector<double> steps = {});

}  // namespace trace_shape
