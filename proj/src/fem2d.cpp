#include "trace_shape/fem2d.hpp"

#include <algorithm>
#include <cmath>

#include "trace_shape/detail/power.hpp"
#include "trace_shape/errors.hpp"

namespace trace_shape {

namespace {

constexpr const char* kModule = "fem2d";
constexpr double kGauss = 0.5773502691896257;  // 1/sqrt(3)

void clamp_weights(std::vector<double>& w) {
  if (w.empty()) return;
  std::vector<double> sorted = w;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
  const double med = std::max(sorted[sorted.size() / 2], 1e-300);
  for (double& x : w) x = std::clamp(x, 1e-3 * med, 1e3 * med);
}

void check_field(const ScalarField& field) {
  if (!field.mesh || field.values.size() != field.mesh->vertices.size()) {
    throw TraceError(ErrorKind::GeometryInvalid, kModule, "field does not match its mesh");
  }
}

}  // namespace

FemDiscretization::FemDiscretization(std::shared_ptr<const Mesh2D> mesh, double p, double q,
                                     const std::vector<int>& extra_pinned)
    : mesh_(std::move(mesh)), p_(p), q_(q), geometry_(kernels::ElementGeometry::build(*mesh_)) {
  pinned_ = mesh_->hole_vertices();
  for (int v : extra_pinned) pinned_.at(static_cast<std::size_t>(v)) = 1;
  for (const auto& e : mesh_->boundary) {
    if (e.tag == BoundaryTag::Outer) outer_edges_.push_back(e.v);
  }
}

double FemDiscretization::numerator(std::span<const double> u, double eps, std::span<double> grad) const {
  return kernels::numerator_parallel(geometry_, u, p_, eps, grad);
}

double FemDiscretization::trace_integral(std::span<const double> u, std::span<double> grad) const {
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  double total = 0.0;
  for (const auto& e : outer_edges_) {
    const auto i = static_cast<std::size_t>(e[0]), j = static_cast<std::size_t>(e[1]);
    const double half = 0.5 * (mesh_->vertices[i] - mesh_->vertices[j]).norm();
    for (double x : {-kGauss, kGauss}) {
      const double phi_i = 0.5 * (1.0 - x), phi_j = 0.5 * (1.0 + x);
      const double ug = phi_i * u[i] + phi_j * u[j];
      total += half * std::pow(std::abs(ug), q_);
      if (want_grad) {
        const double d = half * q_ * detail::signed_power(ug, q_ - 1.0);
        grad[i] += d * phi_i;
        grad[j] += d * phi_j;
      }
    }
  }
  return total;
}

double FemDiscretization::trace_sum(std::span<const double> u) const {
  double s = 0.0;
  for (const auto& e : outer_edges_) s += u[static_cast<std::size_t>(e[0])];
  return s;
}

Eigen::SparseMatrix<double> FemDiscretization::preconditioner(std::span<const double> u, double eps) const {
  const std::size_t nt = geometry_.triangles.size();
  std::vector<double> stiff(nt), mass(3 * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = geometry_.triangles[t];
    const auto& g = geometry_.grad[t];
    double gx = 0.0, gy = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
      gx += g[2 * a] * u[static_cast<std::size_t>(tri[a])];
      gy += g[2 * a + 1] * u[static_cast<std::size_t>(tri[a])];
    }
    stiff[t] = detail::flux_factor(gx * gx + gy * gy, eps, p_);
    for (std::size_t m = 0; m < 3; ++m) {
      const double um =
          0.5 * (u[static_cast<std::size_t>(tri[m])] + u[static_cast<std::size_t>(tri[(m + 1) % 3])]);
      mass[3 * t + m] = detail::flux_factor(um * um, eps, p_);
    }
  }
  clamp_weights(stiff);
  clamp_weights(mass);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(18 * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = geometry_.triangles[t];
    const auto& g = geometry_.grad[t];
    const double area = geometry_.area[t];
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        double v = area * stiff[t] * (g[2 * a] * g[2 * b] + g[2 * a + 1] * g[2 * b + 1]);
        // midpoint m joins local vertices m and m+1; phi_a(mid) = 1/2 on its two ends
        for (std::size_t m = 0; m < 3; ++m) {
          const double pa = (a == m || a == (m + 1) % 3) ? 0.5 : 0.0;
          const double pb = (b == m || b == (m + 1) % 3) ? 0.5 : 0.0;
          v += area / 3.0 * mass[3 * t + m] * pa * pb;
        }
        trip.emplace_back(tri[a], tri[b], v);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh_->vertices.size());
  Eigen::SparseMatrix<double> P(n, n);
  P.setFromTriplets(trip.begin(), trip.end());
  return P;
}

double rayleigh_quotient_2d(const ScalarField& field, double p, double q) {
  check_field(field);
  const FemDiscretization disc(field.mesh, p, q);
  return exact_quotient(disc, field.values);
}

double el_residual(const ScalarField& field, double multiplier, double p, double q) {
  check_field(field);
  const FemDiscretization disc(field.mesh, p, q);
  return scaled_el_residual(disc, field.values, multiplier);
}

TraceResult solve_trace_extremal_2d(std::shared_ptr<const Mesh2D> mesh, const ValidatedProblem& problem,
                                    const FemSolveOptions& options) {
  if (!mesh) throw TraceError(ErrorKind::GeometryInvalid, kModule, "null mesh");
  if (problem.N() != 2) throw TraceError(ErrorKind::GeometryInvalid, kModule, "the FEM solver is 2-D only");
  const double R = problem.R();
  for (const auto& e : mesh->boundary) {
    if (e.tag != BoundaryTag::Outer) continue;
    for (int v : e.v) {
      if (std::abs(mesh->vertices[static_cast<std::size_t>(v)].norm() - R) > 1e-9 * R) {
        throw TraceError(ErrorKind::GeometryInvalid, kModule, "OUTER vertices do not lie on |x| = R");
      }
    }
  }

  const FemDiscretization disc(mesh, problem.p(), problem.q(), options.extra_pinned);
  std::vector<double> init;
  if (options.init) {
    if (options.init->size() != mesh->vertices.size()) {
      throw TraceError(ErrorKind::GeometryInvalid, kModule, "initial field does not match the mesh");
    }
    init = *options.init;
  } else {
    const Eigen::Vector2d c(problem.center()[0], problem.center()[1]);
    init.resize(mesh->vertices.size());
    for (std::size_t i = 0; i < init.size(); ++i) {
      init[i] = std::max((mesh->vertices[i] - c).norm() - problem.r(), 0.0) / (R - problem.r());
    }
  }

  QuotientSolverSettings settings;
  settings.tol = problem.tol();
  settings.eps_initial = 1e-2 / (R - problem.r());
  settings.eps_final = std::min(1e-3 * mesh->min_edge_length(), settings.eps_initial);
  QuotientSolution sol = minimize_trace_quotient(disc, std::move(init), settings);

  TraceResult result;
  result.constant = sol.value;
  result.multiplier = sol.value;
  result.iterations = sol.iterations;
  result.residual = sol.residual;
  result.extremal = ScalarField{std::move(mesh), std::move(sol.u)};
  return result;
}

ScalarField interpolate_radial(std::shared_ptr<const Mesh2D> mesh, const RadialProfile& profile,
                               const Eigen::Vector2d& center) {
  ScalarField field{mesh, std::vector<double>(mesh->vertices.size(), 0.0)};
  const auto& s = profile.nodes;
  const std::vector<char> hole = mesh->hole_vertices();
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (hole[i]) continue;
    const double rho = std::clamp((mesh->vertices[i] - center).norm(), s.front(), s.back());
    const auto it = std::upper_bound(s.begin(), s.end(), rho);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max<long>(it - s.begin() - 1, 0)),
                                                s.size() - 2);
    const double w = (rho - s[k]) / (s[k + 1] - s[k]);
    field.values[i] = (1.0 - w) * profile.values[k] + w * profile.values[k + 1];
  }
  return field;
}

double angular_variation(const ScalarField& field, int angular) {
  check_field(field);
  const auto n = static_cast<std::size_t>(angular);
  const std::size_t rings = field.values.size() / n;
  double worst = 0.0;
  for (std::size_t k = 1; k < rings; ++k) {
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = field.values[k * n + j];
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(sum2 / static_cast<double>(n) - mean * mean, 0.0);
    if (mean > 0.0) worst = std::max(worst, std::sqrt(var) / mean);
  }
  return worst;
}

}  // namespace trace_shape
