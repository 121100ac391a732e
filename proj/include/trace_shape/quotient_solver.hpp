#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "trace_shape/problem.hpp"

namespace trace_shape {

/// A nodal discretization of the trace quotient
///
///   J(u) = N_eps(u) / D(u)^{p/q},   D(u) = int_{dOmega} |u|^q,
///
/// where N_eps is the numerator with (|x|^2 + eps^2)^{p/2} - eps^p in place of
/// |x|^p (eps = 0 gives the exact numerator). Hole nodes are pinned to zero.
class QuotientDiscretization {
 public:
  virtual ~QuotientDiscretization() = default;

  virtual std::size_t size() const = 0;
  virtual double p() const = 0;
  virtual double q() const = 0;
  /// Nonzero entries mark nodes held at zero.
  virtual const std::vector<char>& pinned() const = 0;

  /// Regularized numerator; fills grad (size()) when it is non-empty.
  virtual double numerator(std::span<const double> u, double eps, std::span<double> grad) const = 0;
  /// D(u) = int |u|^q over the outer boundary; fills grad when non-empty.
  virtual double trace_integral(std::span<const double> u, std::span<double> grad) const = 0;
  /// Sum of the boundary trace values; its sign fixes the sign of the extremal.
  virtual double trace_sum(std::span<const double> u) const = 0;
  /// Frozen-coefficient SPD approximation of the numerator Hessian at u, over
  /// all nodes (the solver restricts it to free nodes).
  virtual Eigen::SparseMatrix<double> preconditioner(std::span<const double> u, double eps) const = 0;
};

struct QuotientSolverSettings {
  Tolerances tol;
  double eps_initial = 1e-2;
  double eps_final = 1e-10;
  int preconditioner_refresh = 10;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double step_min = 1e-8;
  double step_max = 1e2;
};

struct QuotientSolution {
  std::vector<double> u;  // nonnegative, unit boundary q-norm
  double value = 0.0;     // exact (eps = 0) quotient at u
  double residual = 0.0;  // scaled_el_residual(u, value)
  int iterations = 0;
  /// Accepted regularized quotient values per continuation stage.
  std::vector<std::vector<double>> stage_history;
  std::vector<double> stage_eps;
};

/// Minimizes J by preconditioned projected gradient descent: Barzilai-Borwein
/// initial steps, Armijo backtracking, rescaling to D = 1 after every accepted
/// step, and eps-continuation eps_k = eps_initial 2^-k down to eps_final (a
/// single eps = 0 stage when p = 2, where the regularization is inert).
///
/// Throws ZeroTrace when the initial guess has no boundary trace and
/// NoConvergence when the iteration budget runs out or the line search stalls
/// above residual_tol.
QuotientSolution minimize_trace_quotient(const QuotientDiscretization& disc, std::vector<double> init,
                                         const QuotientSolverSettings& settings);

/// Exact (eps = 0) quotient value; throws ZeroTrace when D(u) = 0.
double exact_quotient(const QuotientDiscretization& disc, std::span<const double> u);

/// || A(u) - lambda B(u) || / || A(u) || over free nodes, with A the weak
/// p-Laplacian-plus-mass operator and B the weak boundary term |u|^{q-2}u.
double scaled_el_residual(const QuotientDiscretization& disc, std::span<const double> u, double multiplier);

}  // namespace trace_shape
