#pragma once

#include <memory>
#include <vector>

#include "trace_shape/problem.hpp"

namespace trace_shape {

struct SpOdeOptions {
  double ode_tol = 1e-10;
  int samples = 400;  // log-spaced in R - r
};

/// Sampled first eigenvalue S_p(R) of the q = p annulus problem with hole
/// radius r, as a function of the outer radius. Immutable; copies share the
/// interpolant.
class SpCurve {
 public:
  SpCurve(double p, int N, double r, std::vector<double> R, std::vector<double> S, double error_estimate);

  double p() const { return p_; }
  int N() const { return N_; }
  double r() const { return r_; }
  const std::vector<double>& R() const { return R_; }
  const std::vector<double>& S() const { return S_; }
  /// |S(R_end)| change when the integration tolerance is loosened 10x.
  double error_estimate() const { return error_estimate_; }

  bool contains(double R) const { return R >= R_.front() && R <= R_.back(); }
  /// Monotone cubic interpolation; throws OutOfRange outside the sampled range.
  double value(double R) const;
  /// dS/dR from the ODE right-hand side at the interpolated value.
  double derivative(double R) const;

 private:
  double p_;
  int N_;
  double r_;
  std::vector<double> R_, S_;
  double error_estimate_;
  std::shared_ptr<const void> interp_;
};

/// dS/dR = -(N-1) S/R + 1 - (p-1) S^{p/(p-1)}.
double sp_rhs(double p, int N, double R, double S);

/// Integrates the ODE from R0 = 1.01 r, where S(R0) comes from the shooting
/// oracle, to R_end. Throws InitFailure when the shot fails and OdeFailure when
/// the integration does.
SpCurve integrate_sp_ode(double p, int N, double r, double R_end, const SpOdeOptions& options = {});

/// Q(R) = S^{-p/(p-1)} (1 - (N-1) S/R) + 1.
double q_threshold(const SpCurve& curve, double R);

/// Second derivative at t = 0 of the quotient of the translated radial
/// extremal, for the problem's q and R.
double h2_closed_form(const SpCurve& curve, const ValidatedProblem& problem);

/// Number of strict interior local minima of the sampled S values.
int count_local_minima(const SpCurve& curve);

}  // namespace trace_shape
