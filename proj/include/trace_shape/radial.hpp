#pragma once

#include <cstdint>
#include <optional>

#include "trace_shape/problem.hpp"
#include "trace_shape/result.hpp"

namespace trace_shape {

/// Nodes r(R/r)^{k/M}, k = 0..M: geometric grading toward the hole whose
/// refinements (M -> 2M) are nested.
std::vector<double> radial_grid(double r, double R, int M);

/// [sigma_N int_r^R (|u'|^p + |u|^p) s^{N-1} ds] / [sigma_N R^{N-1} |u(R)|^q]^{p/q}.
/// The gradient term is integrated exactly per element, the mass term with
/// 3-point Gauss. Throws ZeroTrace when u(R) = 0.
double rayleigh_quotient_radial(const RadialProfile& profile, const ValidatedProblem& problem);

struct RadialSolveOptions {
  int M = 512;
  std::optional<RadialProfile> init;  // must live on radial_grid(r, R, M)
};

/// Minimizes the radial quotient over P1 profiles vanishing at s = r.
/// Requires a centered hole. The returned profile is nonnegative with
/// u(R) = (sigma_N R^{N-1})^{-1/q}.
TraceResult solve_radial_extremal(const ValidatedProblem& problem, const RadialSolveOptions& options = {});

/// Positive random profile on radial_grid(r, R, M), zero at s = r.
RadialProfile random_radial_profile(const ValidatedProblem& problem, int M, std::uint64_t seed);

/// Integrates (s^{N-1} |u'|^{p-2} u')' = s^{N-1} u^{p-1}, u(r) = 0, u'(r) = slope
/// as a first-order system in (u, w = s^{N-1} u'^{p-1}) with adaptive
/// Dormand-Prince steps, sampling `samples` + 1 points from r to R_end.
RadialProfile shoot_radial_ivp(int N, double p, double r, double R_end, double slope, double ode_tol,
                               int samples = 256);
RadialProfile shoot_radial_ivp(const ValidatedProblem& problem, double slope = 1.0);

/// u'(R)/u(R) at the end of the shot, together with u(R) and u'(R).
struct ShotEnd {
  double u = 0.0;
  double du = 0.0;
};
ShotEnd shoot_to(int N, double p, double r, double R_end, double slope, double ode_tol);

/// First eigenvalue of the q = p problem with outer radius R_eval:
/// (u'(R_eval)/u(R_eval))^{p-1} for the shot from r.
double sp_from_shooting(const ValidatedProblem& problem, double R_eval);
double sp_from_shooting(int N, double p, double r, double R_eval, double ode_tol);

}  // namespace trace_shape
