#include "trace_shape/quotient_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SparseCholesky>

#include "trace_shape/errors.hpp"
#include "trace_shape/log.hpp"

namespace trace_shape {

namespace {

constexpr const char* kModule = "quotient_solver";

using Vec = Eigen::VectorXd;

class FreeMap {
 public:
  explicit FreeMap(const std::vector<char>& pinned) : to_free_(pinned.size(), -1) {
    for (std::size_t i = 0; i < pinned.size(); ++i) {
      if (!pinned[i]) {
        to_free_[i] = static_cast<int>(free_.size());
        free_.push_back(static_cast<int>(i));
      }
    }
  }
  std::size_t free_count() const { return free_.size(); }

  Vec gather(std::span<const double> full) const {
    Vec v(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) v[static_cast<Eigen::Index>(k)] = full[free_[k]];
    return v;
  }
  void scatter(const Vec& v, std::span<double> full) const {
    for (std::size_t k = 0; k < free_.size(); ++k) full[free_[k]] = v[static_cast<Eigen::Index>(k)];
  }
  Eigen::SparseMatrix<double> restrict(const Eigen::SparseMatrix<double>& full) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(full.nonZeros()));
    for (int col = 0; col < full.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(full, col); it; ++it) {
        const int i = to_free_[static_cast<std::size_t>(it.row())];
        const int j = to_free_[static_cast<std::size_t>(it.col())];
        if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
      }
    }
    const auto n = static_cast<Eigen::Index>(free_.size());
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
  }

 private:
  std::vector<int> to_free_;
  std::vector<int> free_;
};

/// Rescales u in place to D(u) = 1 with a nonnegative boundary mean. Returns
/// false when u has no boundary trace.
bool normalize(const QuotientDiscretization& disc, std::vector<double>& u) {
  const double d = disc.trace_integral(u, {});
  if (!(d > 0.0) || !std::isfinite(d)) return false;
  double scale = std::pow(d, -1.0 / disc.q());
  if (disc.trace_sum(u) < 0.0) scale = -scale;
  for (double& v : u) v *= scale;
  return true;
}

struct Evaluation {
  double value = 0.0;
  Vec grad;           // gradient of J on free nodes
  double grad_numerator_norm = 0.0;
};

/// J and its gradient at a normalized u (D(u) = 1).
Evaluation evaluate(const QuotientDiscretization& disc, const FreeMap& map, const std::vector<double>& u,
                    double eps) {
  std::vector<double> g(u.size(), 0.0), gd(u.size(), 0.0);
  Evaluation e;
  e.value = disc.numerator(u, eps, g);
  disc.trace_integral(u, gd);
  const double gu = std::inner_product(g.begin(), g.end(), u.begin(), 0.0);
  const Vec gf = map.gather(g);
  const Vec gdf = map.gather(gd);
  e.grad = gf - (gu / disc.q()) * gdf;
  e.grad_numerator_norm = gf.norm();
  return e;
}

double relative_residual(const Evaluation& e) {
  return e.grad_numerator_norm > 0.0 ? e.grad.norm() / e.grad_numerator_norm : e.grad.norm();
}

std::vector<double> eps_schedule(const QuotientDiscretization& disc, const QuotientSolverSettings& s) {
  if (disc.p() == 2.0) return {0.0};
  std::vector<double> out;
  for (double eps = s.eps_initial; eps > s.eps_final; eps *= 0.5) out.push_back(eps);
  out.push_back(s.eps_final);
  return out;
}

}  // namespace

double exact_quotient(const QuotientDiscretization& disc, std::span<const double> u) {
  const double d = disc.trace_integral(u, {});
  if (!(d > 0.0)) throw TraceError(ErrorKind::ZeroTrace, kModule, "function vanishes on the outer boundary");
  return disc.numerator(u, 0.0, {}) / std::pow(d, disc.p() / disc.q());
}

double scaled_el_residual(const QuotientDiscretization& disc, std::span<const double> u, double multiplier) {
  std::vector<double> a(u.size(), 0.0), b(u.size(), 0.0);
  disc.numerator(u, 0.0, a);
  disc.trace_integral(u, b);
  const auto& pinned = disc.pinned();
  double rr = 0.0, aa = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (pinned[i]) continue;
    // gradients carry the factors p and q of the weak forms
    const double ai = a[i] / disc.p();
    const double ri = ai - multiplier * b[i] / disc.q();
    rr += ri * ri;
    aa += ai * ai;
  }
  return aa > 0.0 ? std::sqrt(rr / aa) : std::sqrt(rr);
}

QuotientSolution minimize_trace_quotient(const QuotientDiscretization& disc, std::vector<double> init,
                                         const QuotientSolverSettings& settings) {
  if (init.size() != disc.size()) {
    throw TraceError(ErrorKind::ConfigError, kModule, "initial guess has the wrong size");
  }
  const auto& pinned = disc.pinned();
  for (std::size_t i = 0; i < init.size(); ++i) {
    if (pinned[i]) init[i] = 0.0;
  }
  std::vector<double> u = std::move(init);
  if (!normalize(disc, u)) {
    throw TraceError(ErrorKind::ZeroTrace, kModule, "initial guess vanishes on the outer boundary");
  }

  const FreeMap map(pinned);
  const Tolerances& tol = settings.tol;
  const std::vector<double> schedule = eps_schedule(disc, settings);

  QuotientSolution sol;
  int iterations = 0;

  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    const double eps = schedule[stage];
    const bool final_stage = stage + 1 == schedule.size();
    std::vector<double>& history = sol.stage_history.emplace_back();
    sol.stage_eps.push_back(eps);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> precond;
    Eigen::SparseMatrix<double> metric;
    auto refresh = [&] {
      metric = map.restrict(disc.preconditioner(u, eps));
      precond.compute(metric);
      if (precond.info() != Eigen::Success) {
        throw TraceError(ErrorKind::NoConvergence, kModule, "preconditioner factorization failed");
      }
    };
    refresh();

    Evaluation current = evaluate(disc, map, u, eps);
    history.push_back(current.value);
    Vec prev_u, prev_grad;
    int stage_iter = 0;

    while (true) {
      const double resid = relative_residual(current);
      const std::size_t k = history.size();
      const bool window_ok =
          k > 10 && (history[k - 11] - history[k - 1]) <= tol.solver_rel_tol * std::abs(history[k - 1]);
      if (final_stage ? (resid <= tol.residual_tol && window_ok) : (resid <= tol.residual_tol || window_ok)) {
        break;
      }
      if (iterations >= tol.max_iterations) {
        throw TraceError(ErrorKind::NoConvergence, kModule,
                         "iteration budget of " + std::to_string(tol.max_iterations) +
                             " exhausted (residual " + std::to_string(resid) + ")");
      }

      const Vec direction = -precond.solve(current.grad);
      const double slope = current.grad.dot(direction);
      const Vec uf = map.gather(u);

      double alpha = 1.0;
      if (prev_u.size() > 0) {
        // Barzilai-Borwein step in the preconditioner metric: s^T P s / s^T y
        const Vec s = uf - prev_u;
        const Vec y = current.grad - prev_grad;
        const double sy = s.dot(y);
        if (sy > 0.0) alpha = std::clamp(s.dot(metric * s) / sy, settings.step_min, settings.step_max);
      }

      bool accepted = false;
      std::vector<double> trial(u.size());
      double trial_value = 0.0;
      for (int bt = 0; bt < 60 && !accepted; ++bt, alpha *= settings.backtrack) {
        std::copy(u.begin(), u.end(), trial.begin());
        map.scatter(uf + alpha * direction, trial);
        if (!normalize(disc, trial)) continue;
        trial_value = disc.numerator(trial, eps, {});
        if (std::isfinite(trial_value) && trial_value <= current.value + settings.armijo_c * alpha * slope) {
          accepted = true;
        }
      }
      if (!accepted) {
        // stalled at round-off level
        if (resid <= tol.residual_tol) break;
        throw TraceError(ErrorKind::NoConvergence, kModule,
                         "line search stalled with residual " + std::to_string(resid));
      }

      prev_u = uf;
      prev_grad = current.grad;
      u.swap(trial);
      ++iterations;
      ++stage_iter;
      if (disc.p() != 2.0 && stage_iter % settings.preconditioner_refresh == 0) refresh();
      current = evaluate(disc, map, u, eps);
      history.push_back(current.value);
    }
    log().debug("stage eps={:.3e}: {} iterations, J={:.15g}", eps, stage_iter, current.value);
  }

  for (double& v : u) v = std::abs(v);
  normalize(disc, u);
  sol.value = exact_quotient(disc, u);
  sol.residual = scaled_el_residual(disc, u, sol.value);
  sol.iterations = iterations;
  sol.u = std::move(u);
  return sol;
}

}  // namespace trace_shape
