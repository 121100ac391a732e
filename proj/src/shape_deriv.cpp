#include "trace_shape/shape_deriv.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "trace_shape/errors.hpp"
#include "trace_shape/parallel.hpp"

namespace trace_shape {

namespace {

constexpr const char* kModule = "shape_deriv";

void check_normalized(const FemDiscretization& disc, std::span<const double> u) {
  for (double v : u) {
    if (v < 0.0) throw TraceError(ErrorKind::NotNormalized, kModule, "extremal has negative values");
  }
  const double norm = disc.trace_integral(u, {});
  if (std::abs(norm - 1.0) > 1e-8) {
    throw TraceError(ErrorKind::NotNormalized, kModule, "OUTER trace integral is " + std::to_string(norm) + ", not 1");
  }
}

std::vector<std::array<double, 4>> centroid_jacobians(const Mesh2D& mesh, const DeformationField& field) {
  std::vector<std::array<double, 4>> out(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector2d c = (mesh.vertices[static_cast<std::size_t>(tri[0])] +
                               mesh.vertices[static_cast<std::size_t>(tri[1])] +
                               mesh.vertices[static_cast<std::size_t>(tri[2])]) /
                              3.0;
    const Eigen::Matrix2d J = field.jacobian(c);
    out[t] = {J(0, 0), J(0, 1), J(1, 0), J(1, 1)};
  }
  return out;
}

double boundary_form(const FemDiscretization& disc, std::span<const double> u, const DeformationField& field,
                     double p) {
  const Mesh2D& mesh = *disc.mesh();
  const auto& geo = disc.geometry();
  double total = 0.0;
  for (const auto& e : mesh.boundary) {
    if (e.tag != BoundaryTag::Hole) continue;
    // the unique triangle containing both endpoints
    const auto a = static_cast<std::size_t>(e.v[0]);
    const auto b = static_cast<std::size_t>(e.v[1]);
    int owner = -1;
    for (int k = geo.incident_offset[a]; k < geo.incident_offset[a + 1]; ++k) {
      const auto t = static_cast<std::size_t>(geo.incident[static_cast<std::size_t>(k)] / 3);
      const auto& tri = geo.triangles[t];
      if (tri[0] == e.v[1] || tri[1] == e.v[1] || tri[2] == e.v[1]) {
        owner = static_cast<int>(t);
        break;
      }
    }
    if (owner < 0) throw TraceError(ErrorKind::GeometryInvalid, kModule, "HOLE edge without a triangle");
    const auto t = static_cast<std::size_t>(owner);
    const auto& tri = geo.triangles[t];
    const auto& g = geo.grad[t];
    Eigen::Vector2d du = Eigen::Vector2d::Zero();
    for (std::size_t k = 0; k < 3; ++k) du += u[static_cast<std::size_t>(tri[k])] * Eigen::Vector2d(g[2 * k], g[2 * k + 1]);

    const Eigen::Vector2d xa = mesh.vertices[a], xb = mesh.vertices[b];
    const Eigen::Vector2d mid = 0.5 * (xa + xb);
    const double len = (xb - xa).norm();
    Eigen::Vector2d nu(xb.y() - xa.y(), xa.x() - xb.x());
    nu /= len;
    // nu must point into the hole, i.e. away from the owning triangle
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (int v : tri) centroid += mesh.vertices[static_cast<std::size_t>(v)] / 3.0;
    if (nu.dot(centroid - mid) > 0.0) nu = -nu;

    const double dnu = du.dot(nu);
    total += std::pow(std::abs(dnu), p) * field.value(mid).dot(nu) * len;
  }
  return -(p - 1.0) * total;
}

ShapeDerivative evaluate(const TraceResult& result, const DeformationField& field, double p, double q, bool parallel) {
  const ScalarField& u = result.field();
  if (!u.mesh || u.values.size() != u.mesh->vertices.size()) {
    throw TraceError(ErrorKind::GeometryInvalid, kModule, "field does not match its mesh");
  }
  const FemDiscretization disc(u.mesh, p, q);
  check_normalized(disc, u.values);
  const auto jac = centroid_jacobians(*u.mesh, field);
  ShapeDerivative d;
  d.volume_form = parallel ? kernels::volume_form_parallel(disc.geometry(), u.values, p, jac)
                           : kernels::volume_form_serial(disc.geometry(), u.values, p, jac);
  d.boundary_form = boundary_form(disc, u.values, field, p);
  return d;
}

}  // namespace

ShapeDerivative shape_derivative(const TraceResult& result, const DeformationField& field, double p, double q) {
  return evaluate(result, field, p, q, true);
}

ShapeDerivative shape_derivative_serial(const TraceResult& result, const DeformationField& field, double p,
                                        double q) {
  return evaluate(result, field, p, q, false);
}

FiniteDifferenceReport finite_difference_slope(const ValidatedProblem& problem, std::shared_ptr<const Mesh2D> mesh,
                                               const DeformationField& field, std::vector<double> steps) {
  if (steps.empty()) {
    for (double t = problem.tol().fd_step_max; t >= problem.tol().fd_step_min * (1.0 - 1e-12); t *= 0.5) {
      steps.push_back(t);
    }
  }
  if (steps.size() < 2) throw TraceError(ErrorKind::OutOfRange, kModule, "need at least two steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(steps[i] > 0.0) || (i > 0 && !(steps[i] < steps[i - 1]))) {
      throw TraceError(ErrorKind::OutOfRange, kModule, "steps must be positive and decreasing");
    }
  }

  const TraceResult base = solve_trace_extremal_2d(mesh, problem);
  const std::vector<double>& warm = base.field().values;

  // transports first (sequentially, so MeshInverted surfaces deterministically)
  const std::size_t n = steps.size();
  std::vector<std::shared_ptr<const Mesh2D>> moved(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    moved[2 * i] = std::make_shared<const Mesh2D>(transport_mesh(*mesh, field, steps[i]));
    moved[2 * i + 1] = std::make_shared<const Mesh2D>(transport_mesh(*mesh, field, -steps[i]));
  }
  std::vector<double> values(2 * n);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_threads())
  for (long k = 0; k < static_cast<long>(2 * n); ++k) {
    try {
      const auto kk = static_cast<std::size_t>(k);
      values[kk] = solve_trace_extremal_2d(moved[kk], problem, {.init = warm, .extra_pinned = {}}).constant;
    } catch (...) {
#pragma omp critical(trace_shape_fd_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  FiniteDifferenceReport report;
  report.value_at_zero = base.constant;
  report.steps = steps;
  for (std::size_t i = 0; i < n; ++i) {
    report.central.push_back((values[2 * i] - values[2 * i + 1]) / (2.0 * steps[i]));
    report.one_sided.push_back((values[2 * i] - base.constant) / steps[i]);
  }
  // one Richardson level on the two finest steps; central error is O(t^2)
  const double t1 = steps[n - 2], t2 = steps[n - 1];
  const double ratio2 = (t1 / t2) * (t1 / t2);
  report.slope = (ratio2 * report.central[n - 1] - report.central[n - 2]) / (ratio2 - 1.0);

  for (std::size_t i = n; i-- > 0;) report.table.push_back({-steps[i], values[2 * i + 1]});
  report.table.push_back({0.0, base.constant});
  for (std::size_t i = n; i-- > 0;) report.table.push_back({steps[i], values[2 * i]});
  std::sort(report.table.begin(), report.table.end());
  return report;
}

}  // namespace trace_shape
