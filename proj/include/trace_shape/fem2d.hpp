#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "trace_shape/kernels.hpp"
#include "trace_shape/quotient_solver.hpp"
#include "trace_shape/result.hpp"

namespace trace_shape {

/// P1 trace quotient on a Mesh2D: exact per-triangle |grad u|^p, edge-midpoint
/// quadrature of |u|^p, and 2-point Gauss of |u|^q on OUTER edges. HOLE
/// vertices (plus any extra ones requested) are pinned to zero.
class FemDiscretization final : public QuotientDiscretization {
 public:
  FemDiscretization(std::shared_ptr<const Mesh2D> mesh, double p, double q, const std::vector<int>& extra_pinned = {});

  std::size_t size() const override { return mesh_->vertices.size(); }
  double p() const override { return p_; }
  double q() const override { return q_; }
  const std::vector<char>& pinned() const override { return pinned_; }
  double numerator(std::span<const double> u, double eps, std::span<double> grad) const override;
  double trace_integral(std::span<const double> u, std::span<double> grad) const override;
  double trace_sum(std::span<const double> u) const override;
  Eigen::SparseMatrix<double> preconditioner(std::span<const double> u, double eps) const override;

  const kernels::ElementGeometry& geometry() const { return geometry_; }
  const std::shared_ptr<const Mesh2D>& mesh() const { return mesh_; }

 private:
  std::shared_ptr<const Mesh2D> mesh_;
  double p_, q_;
  kernels::ElementGeometry geometry_;
  std::vector<char> pinned_;
  std::vector<std::array<int, 2>> outer_edges_;
};

/// Exact (unsmoothed) quotient of a field. Throws ZeroTrace when the field
/// vanishes on every OUTER edge.
double rayleigh_quotient_2d(const ScalarField& field, double p, double q);

struct FemSolveOptions {
  std::optional<std::vector<double>> init;  // nodal values on the same mesh
  std::vector<int> extra_pinned;             // additional vertices held at zero
};

/// Minimizes the quotient over P1 fields vanishing on the hole, with the
/// eps-continuation ending at 1e-3 times the shortest mesh edge. Throws
/// GeometryInvalid when OUTER vertices are off the circle |x| = R.
TraceResult solve_trace_extremal_2d(std::shared_ptr<const Mesh2D> mesh, const ValidatedProblem& problem,
                                    const FemSolveOptions& options = {});

/// Scaled weak-form residual of the boundary-value system, over all
/// non-HOLE basis functions.
double el_residual(const ScalarField& field, double multiplier, double p, double q);

/// Nodal interpolant of a radial profile u(|x - center|), zero on HOLE vertices.
ScalarField interpolate_radial(std::shared_ptr<const Mesh2D> mesh, const RadialProfile& profile,
                               const Eigen::Vector2d& center);

/// Angular spread of a field on a structured mesh: the largest ratio of
/// standard deviation to mean over the rings, skipping the hole ring.
double angular_variation(const ScalarField& field, int angular);

}  // namespace trace_shape
