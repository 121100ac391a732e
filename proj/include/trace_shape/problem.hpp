#pragma once

#include <vector>

namespace trace_shape {

/// Numerical knobs shared by every solver. Lengths are absolute.
struct Tolerances {
  double solver_rel_tol = 1e-8;
  double residual_tol = 1e-6;
  double ode_tol = 1e-10;
  double fd_step_min = 1e-3;
  double fd_step_max = 4e-3;
  int max_iterations = 10000;

  /// Defaults with the finite-difference steps scaled to a reference length
  /// (the annulus width R - r).
  static Tolerances for_length(double length);
};

/// Raw problem description: dimension, exponents and the geometry
/// Omega = B_R(0), A = B_r(center). Nothing is checked here.
struct TraceProblem {
  int N = 2;
  double p = 2.0;
  double q = 2.0;
  double R = 1.0;
  double r = 0.5;
  std::vector<double> center;  // empty means the origin
  Tolerances tolerances;
};

/// A TraceProblem whose invariants have been checked. Solvers only accept this
/// type; the only way to obtain one is validate_problem.
class ValidatedProblem {
 public:
  const TraceProblem& raw() const noexcept { return problem_; }

  int N() const noexcept { return problem_.N; }
  double p() const noexcept { return problem_.p; }
  double q() const noexcept { return problem_.q; }
  double R() const noexcept { return problem_.R; }
  double r() const noexcept { return problem_.r; }
  const std::vector<double>& center() const noexcept { return problem_.center; }
  const Tolerances& tol() const noexcept { return problem_.tolerances; }

  double critical_exponent() const;
  double center_norm() const;
  bool centered() const { return center_norm() == 0.0; }

  /// Same problem with another hole center / trace exponent, re-validated.
  ValidatedProblem with_center(std::vector<double> center) const;
  ValidatedProblem with_q(double q) const;
  ValidatedProblem with_outer_radius(double R) const;

  friend bool operator==(const ValidatedProblem&, const ValidatedProblem&) = default;

 private:
  explicit ValidatedProblem(TraceProblem problem) : problem_(std::move(problem)) {}
  friend ValidatedProblem validate_problem(const TraceProblem& raw);

  TraceProblem problem_;
};

bool operator==(const Tolerances&, const Tolerances&);
bool operator==(const TraceProblem&, const TraceProblem&);

/// p(N-1)/(N-p) for p < N, +infinity otherwise.
double critical_exponent(double p, int N);

/// Checks every TraceProblem invariant; throws TraceError with
/// ExponentOutOfRange, GeometryInvalid or BadTolerance. The center is padded to
/// N zeros when empty. Warns (does not fail) when q > 0.9 p* for finite p*.
ValidatedProblem validate_problem(const TraceProblem& raw);
ValidatedProblem validate_problem(const ValidatedProblem& problem);

/// Surface measure of the sphere of the given radius in R^N.
double sphere_measure(int N, double radius);

}  // namespace trace_shape
