#include "trace_shape/problem.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "trace_shape/errors.hpp"
#include "trace_shape/log.hpp"

namespace trace_shape {

namespace {

constexpr const char* kModule = "problem_core";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) {
  throw TraceError(kind, kModule, message);
}

}  // namespace

Tolerances Tolerances::for_length(double length) {
  Tolerances t;
  t.fd_step_min = 1e-3 * length;
  t.fd_step_max = 4e-3 * length;
  return t;
}

bool operator==(const Tolerances& a, const Tolerances& b) {
  return a.solver_rel_tol == b.solver_rel_tol && a.residual_tol == b.residual_tol &&
         a.ode_tol == b.ode_tol && a.fd_step_min == b.fd_step_min &&
         a.fd_step_max == b.fd_step_max && a.max_iterations == b.max_iterations;
}

bool operator==(const TraceProblem& a, const TraceProblem& b) {
  return a.N == b.N && a.p == b.p && a.q == b.q && a.R == b.R && a.r == b.r &&
         a.center == b.center && a.tolerances == b.tolerances;
}

double critical_exponent(double p, int N) {
  if (!(p > 1.0) || N < 2) fail(ErrorKind::ExponentOutOfRange, "critical_exponent needs p > 1 and N >= 2");
  if (p >= N) return std::numeric_limits<double>::infinity();
  return p * (N - 1) / (N - p);
}

double sphere_measure(int N, double radius) {
  if (N < 1 || !(radius > 0.0)) fail(ErrorKind::GeometryInvalid, "sphere_measure needs N >= 1 and radius > 0");
  const double half = 0.5 * N;
  return N * std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0) * std::pow(radius, N - 1);
}

double ValidatedProblem::critical_exponent() const { return trace_shape::critical_exponent(p(), N()); }

double ValidatedProblem::center_norm() const {
  double s = 0.0;
  for (double c : problem_.center) s += c * c;
  return std::sqrt(s);
}

ValidatedProblem ValidatedProblem::with_center(std::vector<double> center) const {
  TraceProblem raw = problem_;
  raw.center = std::move(center);
  return validate_problem(raw);
}

ValidatedProblem ValidatedProblem::with_q(double q) const {
  TraceProblem raw = problem_;
  raw.q = q;
  return validate_problem(raw);
}

ValidatedProblem ValidatedProblem::with_outer_radius(double R) const {
  TraceProblem raw = problem_;
  raw.R = R;
  return validate_problem(raw);
}

ValidatedProblem validate_problem(const TraceProblem& raw) {
  if (raw.N < 2) fail(ErrorKind::GeometryInvalid, "dimension N must be >= 2");
  if (!(raw.p > 1.0) || !std::isfinite(raw.p)) fail(ErrorKind::ExponentOutOfRange, "p must satisfy 1 < p < inf");
  const double p_star = critical_exponent(raw.p, raw.N);
  if (!(raw.q > 1.0) || !(raw.q < p_star)) {
    fail(ErrorKind::ExponentOutOfRange, "q must satisfy 1 < q < p* (p* = " + std::to_string(p_star) + ")");
  }
  if (std::isfinite(p_star) && raw.q > 0.9 * p_star) {
    log().warn("q = {} exceeds 0.9 p* = {}; extremals concentrate and mesh resolution may be unreliable",
               raw.q, 0.9 * p_star);
  }

  if (!(raw.r > 0.0) || !(raw.R > raw.r) || !std::isfinite(raw.R)) {
    fail(ErrorKind::GeometryInvalid, "radii must satisfy 0 < r < R");
  }
  TraceProblem checked = raw;
  if (checked.center.empty()) checked.center.assign(static_cast<std::size_t>(raw.N), 0.0);
  if (checked.center.size() != static_cast<std::size_t>(raw.N)) {
    fail(ErrorKind::GeometryInvalid, "center must have N components");
  }
  double c2 = 0.0;
  for (double c : checked.center) {
    if (!std::isfinite(c)) fail(ErrorKind::GeometryInvalid, "center must be finite");
    c2 += c * c;
  }
  if (!(std::sqrt(c2) + raw.r < raw.R)) fail(ErrorKind::GeometryInvalid, "hole must lie strictly inside: |c| + r < R");

  const Tolerances& t = raw.tolerances;
  auto unit_open = [](double v) { return v > 0.0 && v < 1.0; };
  if (!unit_open(t.solver_rel_tol) || !unit_open(t.residual_tol) || !unit_open(t.ode_tol)) {
    fail(ErrorKind::BadTolerance, "solver_rel_tol, residual_tol and ode_tol must lie in (0, 1)");
  }
  if (!(t.fd_step_min > 0.0) || !(t.fd_step_max >= t.fd_step_min)) {
    fail(ErrorKind::BadTolerance, "finite-difference steps must satisfy 0 < fd_step_min <= fd_step_max");
  }
  if (t.max_iterations < 1) fail(ErrorKind::BadTolerance, "max_iterations must be >= 1");

  return ValidatedProblem(std::move(checked));
}

ValidatedProblem validate_problem(const ValidatedProblem& problem) { return validate_problem(problem.raw()); }

}  // namespace trace_shape
