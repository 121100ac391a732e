#include <cmath>

#include "doctest.h"
#include "trace_shape/errors.hpp"
#include "trace_shape/radial.hpp"
#include "trace_shape/sp_ode.hpp"

using namespace trace_shape;

namespace {

ValidatedProblem annulus(double p, double q, int N, double R) {
  TraceProblem raw;
  raw.N = N;
  raw.p = p;
  raw.q = q;
  raw.r = 1.0;
  raw.R = R;
  return validate_problem(raw);
}

}  // namespace

TEST_CASE("curve agrees with the shooting oracle") {
  for (int N : {2, 3}) {
    for (double p : {1.5, 2.0, 3.0}) {
      const SpCurve curve = integrate_sp_ode(p, N, 1.0, 4.0);
      for (double R : {1.5, 2.0, 4.0}) {
        const double oracle = sp_from_shooting(N, p, 1.0, R, 1e-12);
        CHECK(std::abs(curve.value(R) / oracle - 1.0) < 1e-4);
      }
    }
  }
}

TEST_CASE("p = 2 closed forms") {
  const SpCurve plane = integrate_sp_ode(2.0, 2, 1.0, 2.0);
  CHECK(plane.value(2.0) == doctest::Approx(1.03827098078932).epsilon(1e-8));
  // N = 3: u = sinh(s - 1)/s
  const SpCurve space = integrate_sp_ode(2.0, 3, 1.0, 100.0);
  auto exact = [](double R) { return 1.0 / std::tanh(R - 1.0) - 1.0 / R; };
  for (std::size_t i = 0; i < space.R().size(); i += 25) {
    CHECK(space.S()[i] == doctest::Approx(exact(space.R()[i])).epsilon(1e-8));
  }
  for (double R : {1.5, 3.0, 10.0, 100.0}) CHECK(space.value(R) == doctest::Approx(exact(R)).epsilon(1e-5));
}

TEST_CASE("threshold asymptotics") {
  for (int N : {2, 3}) {
    for (double p : {1.5, 2.0, 3.0}) {
      const SpCurve curve = integrate_sp_ode(p, N, 1.0, 100.0);
      CHECK(q_threshold(curve, 1.01) < 1.0);
      CHECK(std::abs(q_threshold(curve, 100.0) - p) < 0.05);
      // N = 3 sits on the bound: S(100) = coth(99) - 1/100 exactly.
      if (p == 2.0) CHECK(std::abs(curve.value(100.0) - 1.0) < 1e-2 + 1e-8);
      CHECK(count_local_minima(curve) <= 1);
    }
  }
}

TEST_CASE("threshold identity and derivative sign") {
  for (double p : {1.5, 2.0, 3.0}) {
    const SpCurve curve = integrate_sp_ode(p, 2, 1.0, 20.0);
    for (std::size_t i = 0; i < curve.R().size(); i += 7) {
      const double R = curve.R()[i], S = curve.S()[i];
      const double Q = q_threshold(curve, R);
      const double identity = 1.0 - (Q - 1.0) * std::pow(S, p / (p - 1.0)) - S / R;
      CHECK(std::abs(identity) < 1e-13 * (1.0 + std::abs(Q - 1.0) * std::pow(S, p / (p - 1.0))));
      const double dS = sp_rhs(p, 2, R, S);
      CHECK(std::abs((Q - p) - std::pow(S, -p / (p - 1.0)) * dS) < 1e-10);
      if (std::abs(dS) > 1e-12) CHECK((dS > 0.0) == (Q > p));
    }
  }
}

TEST_CASE("p = 2, N = 2, r = 1, R = 2: threshold and h''(0)") {
  const SpCurve curve = integrate_sp_ode(2.0, 2, 1.0, 2.0);
  const double Q = q_threshold(curve, 2.0);
  const double S = 1.03827098078932;
  CHECK(Q == doctest::Approx((1.0 - S / 2.0) / (S * S) + 1.0).epsilon(1e-9));

  CHECK(std::abs(h2_closed_form(curve, annulus(2.0, Q, 2, 2.0))) < 1e-12);
  CHECK(h2_closed_form(curve, annulus(2.0, 1.2 * Q, 2, 2.0)) < 0.0);
  CHECK(h2_closed_form(curve, annulus(2.0, 0.9 * Q, 2, 2.0)) > 0.0);
}

TEST_CASE("error estimate bounds the effect of tighter tolerance") {
  const SpCurve coarse = integrate_sp_ode(3.0, 3, 1.0, 10.0, {.ode_tol = 1e-8});
  const SpCurve fine = integrate_sp_ode(3.0, 3, 1.0, 10.0, {.ode_tol = 1e-9});
  CHECK(coarse.error_estimate() > 0.0);
  CHECK(std::abs(fine.S().back() - coarse.S().back()) < 10.0 * coarse.error_estimate());
}

TEST_CASE("curve range and input checks") {
  const SpCurve curve = integrate_sp_ode(2.0, 2, 1.0, 3.0);
  CHECK(curve.R().front() == doctest::Approx(1.01));
  CHECK_THROWS_AS(curve.value(3.5), TraceError);
  CHECK_THROWS_AS(q_threshold(curve, 1.0), TraceError);
  CHECK_THROWS_AS(integrate_sp_ode(2.0, 2, 1.0, 1.005), TraceError);
  for (double s : curve.S()) CHECK(s > 0.0);
}
