#pragma once

#include <array>
#include <vector>

#include "trace_shape/deformation.hpp"
#include "trace_shape/problem.hpp"

namespace trace_shape {

struct MeshResolution {
  int layers = 64;
  int angular = 128;
};

struct SweepReport {
  std::vector<double> offsets;    // t, ascending, symmetric about 0
  std::vector<double> constants;  // S_q with the hole at t e1
  double h2_numeric = 0.0;
  double h2_closed = 0.0;
  double Q = 0.0;                 // threshold at the problem's R
  double q = 0.0;
};

/// Default offsets {0, +-0.01, +-0.02} (R - r).
std::vector<double> default_sweep_offsets(const ValidatedProblem& problem);

/// Regenerates the mesh with the hole at t e1 for every offset and solves S_q
/// concurrently. h2_numeric fits S(t) = S(0) + c2 t^2 + c4 t^4 through the
/// symmetric averages at the two smallest positive offsets (the standard
/// 5-point stencil when they are a and 2a) and returns 2 c2.
SweepReport sweep_center(const ValidatedProblem& problem, std::vector<double> offsets = {},
                         const MeshResolution& resolution = {});

/// Second difference at t = 0 of h(t), the quotient of the translated radial
/// extremal u0(x - t e1) on meshes with the hole at t e1 (u0 from the shooting
/// oracle, continued past R by the ODE). Same stencil as sweep_center; an
/// independent check of h2_closed_form.
double h2_translated_extremal(const ValidatedProblem& problem, std::vector<double> offsets = {},
                              const MeshResolution& resolution = {});

struct CenterIterate {
  std::array<double, 2> center;
  double value = 0.0;
  std::array<double, 2> gradient;
};

struct OptimizeOptions {
  int max_iter = 20;
  double gradient_tol = 1e-3;  // stop when |g| <= gradient_tol S_q / (R - r)
  double margin = 0.5;         // feasible centers satisfy |c| <= margin (R - r)
  MeshResolution resolution{16, 64};  // keeps min angles above 10 deg up to the margin
};

struct CenterTrajectory {
  std::vector<CenterIterate> iterates;  // accepted iterates, S_q nonincreasing
  bool margin_active = false;
  bool converged = false;
};

/// Projected gradient descent on the hole center with the shape gradient
/// (volume form for TRANSLATION(e1), TRANSLATION(e2)) and Armijo backtracking
/// on S_q. A trial center whose mesh fails the quality check counts as a
/// rejected step. Throws Infeasible when the initial center violates the
/// margin.
CenterTrajectory optimize_center(const ValidatedProblem& problem, std::array<double, 2> init_center,
                                 const OptimizeOptions& options = {});

/// Largest |volume form| / (S_q * RMS of <V, nu> on the hole) over the given
/// fields for the centered problem. Throws NotVolumePreserving when a field's
/// hole flux is not zero to quadrature tolerance.
double criticality_check(const ValidatedProblem& problem, const std::vector<DeformationField>& fields,
                         const MeshResolution& resolution = {});

/// TRANSLATION(e1), TRANSLATION(e2) and `random_count` seeded random
/// volume-preserving combinations of translations, hole inflation and radial
/// bumps centered on the hole circle.
std::vector<DeformationField> criticality_fields(const ValidatedProblem& problem, int random_count,
                                                 unsigned long long seed);

}  // namespace trace_shape
