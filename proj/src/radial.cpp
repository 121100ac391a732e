#include "trace_shape/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "trace_shape/detail/power.hpp"
#include "trace_shape/errors.hpp"
#include "trace_shape/quotient_solver.hpp"

namespace trace_shape {

namespace {

constexpr const char* kModule = "radial";

constexpr std::array<double, 3> kGaussX = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGaussW = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

void clamp_weights(std::vector<double>& w) {
  if (w.empty()) return;
  std::vector<double> sorted = w;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
  const double med = std::max(sorted[sorted.size() / 2], 1e-300);
  for (double& x : w) x = std::clamp(x, 1e-3 * med, 1e3 * med);
}

class RadialDiscretization final : public QuotientDiscretization {
 public:
  RadialDiscretization(int N, double p, double q, std::vector<double> nodes)
      : N_(N), p_(p), q_(q), nodes_(std::move(nodes)), pinned_(nodes_.size(), 0) {
    pinned_[0] = 1;
    sigma_ = sphere_measure(N_, 1.0);
    boundary_weight_ = sigma_ * std::pow(nodes_.back(), N_ - 1);
  }

  std::size_t size() const override { return nodes_.size(); }
  double p() const override { return p_; }
  double q() const override { return q_; }
  const std::vector<char>& pinned() const override { return pinned_; }

  double numerator(std::span<const double> u, double eps, std::span<double> grad) const override {
    const bool want_grad = !grad.empty();
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    double total = 0.0;
    for (std::size_t e = 0; e + 1 < nodes_.size(); ++e) {
      const double a = nodes_[e], b = nodes_[e + 1], h = b - a;
      // |u'|^p is constant on the element; s^{N-1} integrates exactly
      const double slope = (u[e + 1] - u[e]) / h;
      const double shell = (std::pow(b, N_) - std::pow(a, N_)) / N_;
      total += shell * detail::smoothed_power(slope * slope, eps, p_);
      if (want_grad) {
        const double flux = shell * detail::flux_factor(slope * slope, eps, p_) * slope / h;
        grad[e + 1] += flux;
        grad[e] -= flux;
      }
      for (std::size_t g = 0; g < 3; ++g) {
        const double x = kGaussX[g];
        const double s = 0.5 * (a + b) + 0.5 * h * x;
        const double phi0 = 0.5 * (1.0 - x), phi1 = 0.5 * (1.0 + x);
        const double ug = phi0 * u[e] + phi1 * u[e + 1];
        const double w = 0.5 * h * kGaussW[g] * std::pow(s, N_ - 1);
        total += w * detail::smoothed_power(ug * ug, eps, p_);
        if (want_grad) {
          const double f = w * detail::flux_factor(ug * ug, eps, p_) * ug;
          grad[e] += f * phi0;
          grad[e + 1] += f * phi1;
        }
      }
    }
    if (want_grad) {
      for (double& g : grad) g *= sigma_;
    }
    return sigma_ * total;
  }

  double trace_integral(std::span<const double> u, std::span<double> grad) const override {
    const double ub = u.back();
    if (!grad.empty()) {
      std::fill(grad.begin(), grad.end(), 0.0);
      grad.back() = boundary_weight_ * q_ * detail::signed_power(ub, q_ - 1.0);
    }
    return boundary_weight_ * std::pow(std::abs(ub), q_);
  }

  double trace_sum(std::span<const double> u) const override { return u.back(); }

  Eigen::SparseMatrix<double> preconditioner(std::span<const double> u, double eps) const override {
    const std::size_t m = nodes_.size() - 1;
    std::vector<double> stiff(m), mass(3 * m);
    for (std::size_t e = 0; e < m; ++e) {
      const double h = nodes_[e + 1] - nodes_[e];
      const double slope = (u[e + 1] - u[e]) / h;
      stiff[e] = detail::flux_factor(slope * slope, eps, p_);
      for (std::size_t g = 0; g < 3; ++g) {
        const double x = kGaussX[g];
        const double ug = 0.5 * (1.0 - x) * u[e] + 0.5 * (1.0 + x) * u[e + 1];
        mass[3 * e + g] = detail::flux_factor(ug * ug, eps, p_);
      }
    }
    clamp_weights(stiff);
    clamp_weights(mass);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * m * 2);
    for (std::size_t e = 0; e < m; ++e) {
      const double a = nodes_[e], b = nodes_[e + 1], h = b - a;
      const double shell = (std::pow(b, N_) - std::pow(a, N_)) / N_;
      const double k = sigma_ * stiff[e] * shell / (h * h);
      const auto i = static_cast<int>(e), j = static_cast<int>(e + 1);
      trip.emplace_back(i, i, k);
      trip.emplace_back(j, j, k);
      trip.emplace_back(i, j, -k);
      trip.emplace_back(j, i, -k);
      for (std::size_t g = 0; g < 3; ++g) {
        const double x = kGaussX[g];
        const double s = 0.5 * (a + b) + 0.5 * h * x;
        const double phi0 = 0.5 * (1.0 - x), phi1 = 0.5 * (1.0 + x);
        const double w = sigma_ * mass[3 * e + g] * 0.5 * h * kGaussW[g] * std::pow(s, N_ - 1);
        trip.emplace_back(i, i, w * phi0 * phi0);
        trip.emplace_back(j, j, w * phi1 * phi1);
        trip.emplace_back(i, j, w * phi0 * phi1);
        trip.emplace_back(j, i, w * phi0 * phi1);
      }
    }
    const auto n = static_cast<Eigen::Index>(nodes_.size());
    Eigen::SparseMatrix<double> P(n, n);
    P.setFromTriplets(trip.begin(), trip.end());
    return P;
  }

 private:
  int N_;
  double p_, q_;
  std::vector<double> nodes_;
  std::vector<char> pinned_;
  double sigma_ = 0.0;
  double boundary_weight_ = 0.0;
};

void check_profile(const RadialProfile& profile) {
  if (profile.nodes.size() < 9 || profile.nodes.size() != profile.values.size()) {
    throw TraceError(ErrorKind::GeometryInvalid, kModule, "profile needs M >= 8 elements and one value per node");
  }
  for (std::size_t i = 0; i + 1 < profile.nodes.size(); ++i) {
    if (!(profile.nodes[i + 1] > profile.nodes[i])) {
      throw TraceError(ErrorKind::GeometryInvalid, kModule, "profile nodes must be strictly increasing");
    }
  }
}

using State = std::array<double, 2>;

struct RadialOde {
  int N;
  double p;
  void operator()(const State& x, State& dxdt, double s) const {
    const double sn = std::pow(s, N - 1);
    const double w = std::max(x[1], 0.0);
    dxdt[0] = std::pow(w / sn, 1.0 / (p - 1.0));
    dxdt[1] = sn * std::pow(std::max(x[0], 0.0), p - 1.0);
  }
};

void check_shot(int N, double p, double r, double R_end, double slope) {
  if (!(slope > 0.0)) throw TraceError(ErrorKind::OdeFailure, kModule, "shooting slope must be positive");
  if (!(R_end > r) || !(r > 0.0) || N < 2 || !(p > 1.0)) {
    throw TraceError(ErrorKind::OutOfRange, kModule, "shooting needs N >= 2, p > 1 and 0 < r < R_end");
  }
}

}  // namespace

std::vector<double> radial_grid(double r, double R, int M) {
  if (M < 8) throw TraceError(ErrorKind::GeometryInvalid, kModule, "radial grid needs M >= 8");
  std::vector<double> s(static_cast<std::size_t>(M) + 1);
  const double ratio = R / r;
  for (int k = 0; k <= M; ++k) s[static_cast<std::size_t>(k)] = r * std::pow(ratio, static_cast<double>(k) / M);
  s.front() = r;
  s.back() = R;
  return s;
}

double rayleigh_quotient_radial(const RadialProfile& profile, const ValidatedProblem& problem) {
  check_profile(profile);
  if (profile.values.back() == 0.0) {
    throw TraceError(ErrorKind::ZeroTrace, kModule, "profile vanishes at s = R");
  }
  const RadialDiscretization disc(problem.N(), problem.p(), problem.q(), profile.nodes);
  return exact_quotient(disc, profile.values);
}

TraceResult solve_radial_extremal(const ValidatedProblem& problem, const RadialSolveOptions& options) {
  if (!problem.centered()) {
    throw TraceError(ErrorKind::GeometryInvalid, kModule, "the radial solver needs a centered hole");
  }
  std::vector<double> nodes = radial_grid(problem.r(), problem.R(), options.M);
  std::vector<double> init;
  if (options.init) {
    check_profile(*options.init);
    if (options.init->nodes.size() != nodes.size()) {
      throw TraceError(ErrorKind::GeometryInvalid, kModule, "initial profile does not match the grid");
    }
    init = options.init->values;
  } else {
    init.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) init[i] = (nodes[i] - problem.r()) / (problem.R() - problem.r());
  }

  const RadialDiscretization disc(problem.N(), problem.p(), problem.q(), nodes);
  QuotientSolverSettings settings;
  settings.tol = problem.tol();
  settings.eps_initial = 1e-2 / (problem.R() - problem.r());
  settings.eps_final = 1e-10;
  QuotientSolution sol = minimize_trace_quotient(disc, std::move(init), settings);

  TraceResult result;
  result.constant = sol.value;
  result.multiplier = sol.value;
  result.iterations = sol.iterations;
  result.residual = sol.residual;
  result.extremal = RadialProfile{std::move(nodes), std::move(sol.u)};
  return result;
}

RadialProfile random_radial_profile(const ValidatedProblem& problem, int M, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  RadialProfile profile{radial_grid(problem.r(), problem.R(), M), {}};
  profile.values.resize(profile.nodes.size());
  for (double& v : profile.values) v = dist(rng);
  profile.values.front() = 0.0;
  return profile;
}

RadialProfile shoot_radial_ivp(int N, double p, double r, double R_end, double slope, double ode_tol, int samples) {
  check_shot(N, p, r, R_end, slope);
  if (samples < 8) throw TraceError(ErrorKind::OutOfRange, kModule, "need at least 8 samples");
  namespace odeint = boost::numeric::odeint;
  RadialProfile profile;
  profile.nodes = radial_grid(r, R_end, samples);
  State x = {0.0, std::pow(r, N - 1) * std::pow(slope, p - 1.0)};
  try {
    auto stepper = odeint::make_dense_output(ode_tol, ode_tol, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_times(stepper, RadialOde{N, p}, x, profile.nodes.begin(), profile.nodes.end(),
                            1e-6 * (R_end - r),
                            [&](const State& st, double) { profile.values.push_back(st[0]); });
  } catch (const std::exception& e) {
    throw TraceError(ErrorKind::OdeFailure, kModule, std::string("shooting failed: ") + e.what());
  }
  if (profile.values.size() != profile.nodes.size()) {
    throw TraceError(ErrorKind::OdeFailure, kModule, "shooting produced an incomplete profile");
  }
  profile.values.front() = 0.0;
  return profile;
}

RadialProfile shoot_radial_ivp(const ValidatedProblem& problem, double slope) {
  return shoot_radial_ivp(problem.N(), problem.p(), problem.r(), problem.R(), slope, problem.tol().ode_tol);
}

ShotEnd shoot_to(int N, double p, double r, double R_end, double slope, double ode_tol) {
  check_shot(N, p, r, R_end, slope);
  namespace odeint = boost::numeric::odeint;
  State x = {0.0, std::pow(r, N - 1) * std::pow(slope, p - 1.0)};
  try {
    odeint::integrate_adaptive(odeint::make_controlled(ode_tol, ode_tol, odeint::runge_kutta_dopri5<State>()),
                               RadialOde{N, p}, x, r, R_end, 1e-6 * (R_end - r));
  } catch (const std::exception& e) {
    throw TraceError(ErrorKind::OdeFailure, kModule, std::string("shooting failed: ") + e.what());
  }
  if (!std::isfinite(x[0]) || !(x[0] > 0.0)) throw TraceError(ErrorKind::OdeFailure, kModule, "non-positive shot");
  ShotEnd end;
  end.u = x[0];
  end.du = std::pow(x[1] / std::pow(R_end, N - 1), 1.0 / (p - 1.0));
  return end;
}

double sp_from_shooting(int N, double p, double r, double R_eval, double ode_tol) {
  const ShotEnd end = shoot_to(N, p, r, R_eval, 1.0, ode_tol);
  return std::pow(end.du / end.u, p - 1.0);
}

double sp_from_shooting(const ValidatedProblem& problem, double R_eval) {
  return sp_from_shooting(problem.N(), problem.p(), problem.r(), R_eval, problem.tol().ode_tol);
}

}  // namespace trace_shape
