#include "trace_shape/sp_ode.hpp"

#include <cmath>
#include <string>

// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/numeric/odeint.hpp>

#include "trace_shape/errors.hpp"
#include "trace_shape/radial.hpp"

namespace trace_shape {

namespace {

constexpr const char* kModule = "sp_ode";

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

std::vector<double> sample_radii(double r, double R0, double R_end, int samples) {
  std::vector<double> R(static_cast<std::size_t>(samples) + 1);
  const double a = std::log(R0 - r), b = std::log(R_end - r);
  for (int k = 0; k <= samples; ++k) R[static_cast<std::size_t>(k)] = r + std::exp(a + (b - a) * k / samples);
  R.front() = R0;
  R.back() = R_end;
  return R;
}

std::vector<double> integrate_samples(double p, int N, double r, const std::vector<double>& R, double tol) {
  namespace odeint = boost::numeric::odeint;
  double S0 = 0.0;
  try {
    S0 = sp_from_shooting(N, p, r, R.front(), tol);
  } catch (const TraceError& e) {
    throw TraceError(ErrorKind::InitFailure, kModule, std::string("shooting oracle failed: ") + e.what());
  }
  std::vector<double> S;
  S.reserve(R.size());
  double x = S0;
  auto rhs = [p, N](const double& s, double& ds, double rad) { ds = sp_rhs(p, N, rad, s); };
  try {
    auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<double>());
    odeint::integrate_times(stepper, rhs, x, R.begin(), R.end(), 1e-4 * (R[1] - R[0]),
                            [&](const double& s, double) { S.push_back(s); });
  } catch (const std::exception& e) {
    throw TraceError(ErrorKind::OdeFailure, kModule, std::string("integration failed: ") + e.what());
  }
  if (S.size() != R.size()) throw TraceError(ErrorKind::OdeFailure, kModule, "incomplete integration");
  for (double s : S) {
    if (!std::isfinite(s) || !(s > 0.0)) throw TraceError(ErrorKind::OdeFailure, kModule, "S_p left (0, inf)");
  }
  return S;
}

}  // namespace

SpCurve::SpCurve(double p, int N, double r, std::vector<double> R, std::vector<double> S, double error_estimate)
    : p_(p), N_(N), r_(r), R_(std::move(R)), S_(std::move(S)), error_estimate_(error_estimate) {
  if (R_.size() < 4 || R_.size() != S_.size()) {
    throw TraceError(ErrorKind::OutOfRange, kModule, "curve needs at least 4 matching samples");
  }
  interp_ = std::make_shared<const Pchip>(std::vector<double>(R_), std::vector<double>(S_));
}

double SpCurve::value(double R) const {
  if (!contains(R)) {
    throw TraceError(ErrorKind::OutOfRange, kModule,
                     "R = " + std::to_string(R) + " outside [" + std::to_string(R_.front()) + ", " +
                         std::to_string(R_.back()) + "]");
  }
  return (*static_cast<const Pchip*>(interp_.get()))(R);
}

double SpCurve::derivative(double R) const { return sp_rhs(p_, N_, R, value(R)); }

double sp_rhs(double p, int N, double R, double S) {
  return -(N - 1) * S / R + 1.0 - (p - 1.0) * std::pow(S, p / (p - 1.0));
}

SpCurve integrate_sp_ode(double p, int N, double r, double R_end, const SpOdeOptions& options) {
  if (!(p > 1.0) || N < 2 || !(r > 0.0)) {
    throw TraceError(ErrorKind::OutOfRange, kModule, "need p > 1, N >= 2 and r > 0");
  }
  const double R0 = 1.01 * r;
  if (!(R_end > R0)) throw TraceError(ErrorKind::OutOfRange, kModule, "R_end must exceed 1.01 r");
  if (options.samples < 8) throw TraceError(ErrorKind::OutOfRange, kModule, "need at least 8 samples");
  if (!(options.ode_tol > 0.0 && options.ode_tol < 1e-2)) {
    throw TraceError(ErrorKind::BadTolerance, kModule, "ode_tol must lie in (0, 1e-2)");
  }
  std::vector<double> R = sample_radii(r, R0, R_end, options.samples);
  std::vector<double> S = integrate_samples(p, N, r, R, options.ode_tol);
  const std::vector<double> loose = integrate_samples(p, N, r, R, 10.0 * options.ode_tol);
  const double err = std::abs(S.back() - loose.back());
  return SpCurve(p, N, r, std::move(R), std::move(S), err);
}

double q_threshold(const SpCurve& curve, double R) {
  const double p = curve.p();
  const double S = curve.value(R);
  return std::pow(S, -p / (p - 1.0)) * (1.0 - (curve.N() - 1) * S / R) + 1.0;
}

double h2_closed_form(const SpCurve& curve, const ValidatedProblem& problem) {
  const double p = curve.p(), q = problem.q(), R = problem.R();
  const int N = curve.N();
  if (problem.N() != N || problem.p() != p || problem.r() != curve.r()) {
    throw TraceError(ErrorKind::OutOfRange, kModule, "curve and problem disagree on N, p or r");
  }
  const double S = curve.value(R);
  const double bracket = 1.0 - (q - 1.0) * std::pow(S, p / (p - 1.0)) - (N - 1) * S / R;
  const double prefactor = p * std::pow(S, 1.0 / (p - 1.0)) / (N * std::pow(sphere_measure(N, R), p / q - 1.0));
  return prefactor * bracket;
}

int count_local_minima(const SpCurve& curve) {
  const auto& S = curve.S();
  int count = 0;
  for (std::size_t i = 1; i + 1 < S.size(); ++i) {
    if (S[i] < S[i - 1] && S[i] <= S[i + 1]) ++count;
  }
  return count;
}

}  // namespace trace_shape
