#include <chrono>
#include <cmath>
#include <random>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "doctest.h"
#include "trace_shape/errors.hpp"
#include "trace_shape/fem2d.hpp"
#include "trace_shape/radial.hpp"

using namespace trace_shape;

namespace {

ValidatedProblem annulus(double q, std::vector<double> center = {}) {
  TraceProblem raw;
  raw.p = 2.0;
  raw.q = q;
  raw.r = 1.0;
  raw.R = 2.0;
  raw.center = std::move(center);
  return validate_problem(raw);
}

std::shared_ptr<const Mesh2D> make_mesh(const ValidatedProblem& problem, int layers, int angular) {
  return std::make_shared<const Mesh2D>(generate_annular_mesh(problem, layers, angular));
}

// Smallest eigenvalue of (K + M) u = lambda B u on the free vertices by inverse
// power iteration with CG inner solves.
double steklov_inverse_power(const Mesh2D& mesh) {
  const std::size_t n = mesh.vertices.size();
  const std::vector<char> hole = mesh.hole_vertices();
  std::vector<int> index(n, -1);
  int free = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!hole[i]) index[i] = free++;
  }
  std::vector<Eigen::Triplet<double>> a, b;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.signed_area(t);
    Eigen::Vector2d g[3];
    for (int k = 0; k < 3; ++k) {
      const auto& p1 = mesh.vertices[static_cast<std::size_t>(tri[static_cast<std::size_t>((k + 1) % 3)])];
      const auto& p2 = mesh.vertices[static_cast<std::size_t>(tri[static_cast<std::size_t>((k + 2) % 3)])];
      g[k] = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / (2.0 * area);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int I = index[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])];
        const int J = index[static_cast<std::size_t>(tri[static_cast<std::size_t>(j)])];
        if (I < 0 || J < 0) continue;
        const double mass = area / 12.0 * (i == j ? 2.0 : 1.0);
        a.emplace_back(I, J, area * g[i].dot(g[j]) + mass);
      }
    }
  }
  for (const auto& e : mesh.boundary) {
    if (e.tag != BoundaryTag::Outer) continue;
    const double len = (mesh.vertices[static_cast<std::size_t>(e.v[0])] - mesh.vertices[static_cast<std::size_t>(e.v[1])]).norm();
    const int I = index[static_cast<std::size_t>(e.v[0])], J = index[static_cast<std::size_t>(e.v[1])];
    b.emplace_back(I, I, len / 3.0);
    b.emplace_back(J, J, len / 3.0);
    b.emplace_back(I, J, len / 6.0);
    b.emplace_back(J, I, len / 6.0);
  }
  Eigen::SparseMatrix<double> A(free, free), B(free, free);
  A.setFromTriplets(a.begin(), a.end());
  B.setFromTriplets(b.begin(), b.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(A);
  cg.setTolerance(1e-14);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(free);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd next = cg.solveWithGuess(B * u, u);
    next /= std::sqrt(next.dot(B * next));
    const double value = next.dot(A * next);
    u = next;
    if (std::abs(value - lambda) < 1e-15 * value) break;
    lambda = value;
  }
  return u.dot(A * u) / u.dot(B * u);
}

}  // namespace

TEST_CASE("quotient basics") {
  const auto problem = annulus(2.0);
  const auto mesh = make_mesh(problem, 8, 32);
  ScalarField field{mesh, std::vector<double>(mesh->vertices.size())};
  for (std::size_t i = 0; i < field.values.size(); ++i) field.values[i] = std::max(mesh->vertices[i].norm() - 1.0, 0.0);
  const std::vector<char> hole = mesh->hole_vertices();
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (hole[i]) field.values[i] = 0.0;
  }
  const double value = rayleigh_quotient_2d(field, 2.0, 2.0);
  ScalarField scaled = field;
  for (double& v : scaled.values) v *= -3.0;
  CHECK(std::abs(rayleigh_quotient_2d(scaled, 2.0, 2.0) - value) < 1e-14 * value);

  ScalarField no_trace = field;
  for (std::size_t i = 0; i < no_trace.values.size(); ++i) {
    if (std::abs(mesh->vertices[i].norm() - 2.0) < 1e-12) no_trace.values[i] = 0.0;
  }
  CHECK_THROWS_AS(rayleigh_quotient_2d(no_trace, 2.0, 2.0), TraceError);
}

TEST_CASE("linear eigenproblem oracle for p = q = 2") {
  const auto problem = annulus(2.0);
  const auto mesh = make_mesh(problem, 16, 32);
  const TraceResult res = solve_trace_extremal_2d(mesh, problem);
  const double oracle = steklov_inverse_power(*mesh);
  MESSAGE("fem " << res.constant << " oracle " << oracle << " iterations " << res.iterations);
  CHECK(std::abs(res.constant / oracle - 1.0) < 1e-8);
  CHECK(res.residual <= problem.tol().residual_tol);
  CHECK(el_residual(res.field(), res.constant, 2.0, 2.0) <= problem.tol().residual_tol);
  CHECK(el_residual(res.field(), 2.0 * res.constant, 2.0, 2.0) > 0.1);
}

TEST_CASE("radial interpolant bounds the discrete minimum from above") {
  const auto problem = annulus(1.5);
  const TraceResult radial = solve_radial_extremal(problem, {.M = 512});
  const auto mesh = make_mesh(problem, 16, 64);
  const ScalarField interp = interpolate_radial(mesh, radial.profile(), Eigen::Vector2d::Zero());
  const TraceResult fem = solve_trace_extremal_2d(mesh, problem);
  CHECK(rayleigh_quotient_2d(interp, 2.0, 1.5) >= fem.constant - 1e-8);
  CHECK(rayleigh_quotient_2d(interp, 2.0, 1.5) >= radial.constant - 1e-8);
  CHECK(el_residual(interp, fem.constant, 2.0, 1.5) > 100.0 * problem.tol().residual_tol);
}

TEST_CASE("centered extremal is radial") {
  for (double q : {1.5, 2.0}) {
    const auto problem = annulus(q);
    const auto mesh = make_mesh(problem, 32, 64);
    const TraceResult res = solve_trace_extremal_2d(mesh, problem);
    const double spread = angular_variation(res.field(), 64);
    MESSAGE("q = " << q << " angular variation " << spread);
    CHECK(spread <= 1e-3);
    for (double v : res.field().values) CHECK(v >= 0.0);
  }
}

TEST_CASE("converges to the radial value at second order") {
  const auto problem = annulus(2.0);
  const double radial = solve_radial_extremal(problem, {.M = 2048}).constant;
  std::vector<double> err;
  for (int k : {16, 32, 64}) err.push_back(solve_trace_extremal_2d(make_mesh(problem, k, 2 * k), problem).constant - radial);
  MESSAGE("errors " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(std::abs(err[2]) < 1e-2 * radial);
  CHECK(std::log2(err[1] / err[2]) >= 1.5);
}

TEST_CASE("pinning more vertices never lowers the minimum") {
  const auto problem = annulus(1.5);
  const auto mesh = make_mesh(problem, 8, 32);
  const double base = solve_trace_extremal_2d(mesh, problem).constant;
  std::vector<int> extra;
  for (int j = 0; j < 8; ++j) extra.push_back(32 + j);
  const double pinned = solve_trace_extremal_2d(mesh, problem, {.extra_pinned = extra}).constant;
  CHECK(pinned >= base);
}

TEST_CASE("rigid rotation leaves the minimum unchanged") {
  const auto problem = annulus(2.0, {0.2, 0.0});
  const auto mesh = make_mesh(problem, 16, 64);
  const double angle = 0.7;
  const Eigen::Rotation2Dd rot(angle);
  Mesh2D turned = *mesh;
  for (auto& x : turned.vertices) x = rot * x;
  const auto problem_turned = problem.with_center({0.2 * std::cos(angle), 0.2 * std::sin(angle)});
  const double a = solve_trace_extremal_2d(mesh, problem).constant;
  const double b = solve_trace_extremal_2d(std::make_shared<const Mesh2D>(turned), problem_turned).constant;
  CHECK(std::abs(a / b - 1.0) < 1e-6);
}

TEST_CASE("geometry mismatch is rejected") {
  const auto mesh = make_mesh(annulus(2.0), 4, 16);
  TraceProblem raw;
  raw.R = 3.0;
  raw.r = 1.0;
  CHECK_THROWS_AS(solve_trace_extremal_2d(mesh, validate_problem(raw)), TraceError);
}
