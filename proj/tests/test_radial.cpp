#include <cmath>

#include <boost/math/special_functions/bessel.hpp>

#include "doctest.h"
#include "trace_shape/errors.hpp"
#include "trace_shape/radial.hpp"

using namespace trace_shape;
namespace bm = boost::math;

namespace {

ValidatedProblem annulus(double p, double q, int N = 2, double r = 1.0, double R = 2.0) {
  TraceProblem raw;
  raw.N = N;
  raw.p = p;
  raw.q = q;
  raw.r = r;
  raw.R = R;
  return validate_problem(raw);
}

// u = K0(1) I0(s) - I0(1) K0(s) solves u'' + u'/s = u with u(1) = 0.
double bessel_steklov(double R) {
  const double k0 = bm::cyl_bessel_k(0, 1.0), i0 = bm::cyl_bessel_i(0, 1.0);
  const double u = k0 * bm::cyl_bessel_i(0, R) - i0 * bm::cyl_bessel_k(0, R);
  const double du = k0 * bm::cyl_bessel_i(1, R) + i0 * bm::cyl_bessel_k(1, R);
  return du / u;
}

}  // namespace

TEST_CASE("linear profile has the closed-form quotient 25/24") {
  const auto problem = annulus(2.0, 2.0);
  RadialProfile profile;
  profile.nodes = radial_grid(1.0, 2.0, 16);
  for (double s : profile.nodes) profile.values.push_back(s - 1.0);
  CHECK(rayleigh_quotient_radial(profile, problem) == doctest::Approx(25.0 / 24.0).epsilon(1e-14));

  RadialProfile scaled = profile;
  for (double& v : scaled.values) v *= -3.0;
  CHECK(std::abs(rayleigh_quotient_radial(scaled, problem) - 25.0 / 24.0) < 1e-14);
}

TEST_CASE("profile vanishing at R has no trace") {
  const auto problem = annulus(2.0, 2.0);
  RadialProfile profile;
  profile.nodes = radial_grid(1.0, 2.0, 8);
  profile.values.assign(profile.nodes.size(), 0.0);
  profile.values[3] = 1.0;
  CHECK_THROWS_AS(rayleigh_quotient_radial(profile, problem), TraceError);
}

TEST_CASE("grid is nested and graded toward the hole") {
  const auto coarse = radial_grid(1.0, 2.0, 8);
  const auto fine = radial_grid(1.0, 2.0, 16);
  REQUIRE(fine.size() == 17);
  for (std::size_t k = 0; k < coarse.size(); ++k) CHECK(std::abs(fine[2 * k] - coarse[k]) < 1e-15);
  CHECK(fine[1] - fine[0] < fine[16] - fine[15]);
  CHECK(fine.front() == 1.0);
  CHECK(fine.back() == 2.0);
}

TEST_CASE("shooting reproduces the Bessel eigenvalue") {
  const double exact = bessel_steklov(2.0);
  CHECK(exact == doctest::Approx(1.03827098078932).epsilon(1e-13));
  CHECK(std::abs(sp_from_shooting(2, 2.0, 1.0, 2.0, 1e-10) / exact - 1.0) < 1e-9);
  CHECK(std::abs(sp_from_shooting(2, 2.0, 1.0, 4.0, 1e-10) / bessel_steklov(4.0) - 1.0) < 1e-9);
}

TEST_CASE("shooting is invariant under slope rescaling") {
  const ShotEnd a = shoot_to(3, 3.0, 1.0, 2.0, 1.0, 1e-11);
  const ShotEnd b = shoot_to(3, 3.0, 1.0, 2.0, 2.0, 1e-11);
  CHECK(std::abs(a.du / a.u - b.du / b.u) < 1e-8 * (a.du / a.u));
}

TEST_CASE("shooting diverges like (R - r)^-(p - 1) near the hole") {
  for (double p : {1.5, 2.0, 3.0}) {
    const double s2 = sp_from_shooting(2, p, 1.0, 1.0 + 1e-2, 1e-12);
    const double s3 = sp_from_shooting(2, p, 1.0, 1.0 + 1e-3, 1e-12);
    const double slope = std::log(s3 / s2) / std::log(1e-3 / 1e-2);
    CHECK(std::abs(slope + (p - 1.0)) < 0.05 * (p - 1.0));
  }
}

TEST_CASE("shot profile is increasing with unit slope at the hole") {
  const auto profile = shoot_radial_ivp(annulus(2.0, 2.0));
  CHECK(profile.values.front() == 0.0);
  for (std::size_t k = 1; k < profile.values.size(); ++k) CHECK(profile.values[k] > profile.values[k - 1]);
  const double h = profile.nodes[1] - profile.nodes[0];
  CHECK(std::abs(profile.values[1] / h - 1.0) < h);
}

TEST_CASE("variational solver matches the Bessel eigenvalue") {
  const auto problem = annulus(2.0, 2.0);
  const double exact = bessel_steklov(2.0);
  const TraceResult a = solve_radial_extremal(problem, {.M = 256});
  const TraceResult b = solve_radial_extremal(problem, {.M = 512});
  const double richardson = (4.0 * b.constant - a.constant) / 3.0;
  MESSAGE("S(256) = " << a.constant << ", S(512) = " << b.constant << ", it " << b.iterations);
  CHECK(b.constant >= exact - 1e-10);
  CHECK(b.constant <= a.constant + 1e-12);
  CHECK(std::abs(richardson / exact - 1.0) < 1e-6);
  CHECK(b.residual <= problem.tol().residual_tol);
  CHECK(b.multiplier == doctest::Approx(b.constant));
  const auto& u = b.profile();
  CHECK(u.values.front() == 0.0);
  for (double v : u.values) CHECK(v >= 0.0);
  CHECK(u.values.back() == doctest::Approx(std::pow(4.0 * M_PI, -0.5)).epsilon(1e-12));
}

TEST_CASE("sublinear trace exponent: random starts reach the same minimum") {
  const auto problem = annulus(2.0, 1.5);
  const TraceResult ref = solve_radial_extremal(problem, {.M = 128});
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const TraceResult other =
        solve_radial_extremal(problem, {.M = 128, .init = random_radial_profile(problem, 128, seed)});
    CHECK(std::abs(other.constant - ref.constant) <= 10.0 * problem.tol().solver_rel_tol * ref.constant);
    double sup = 0.0;
    for (std::size_t k = 0; k < ref.profile().values.size(); ++k) {
      sup = std::max(sup, std::abs(ref.profile().values[k] - other.profile().values[k]));
    }
    CHECK(sup < 1e-4);
  }
}

TEST_CASE("p-Laplacian extremals for p != 2") {
  for (double p : {1.5, 3.0}) {
    const auto problem = annulus(p, p);
    const TraceResult res = solve_radial_extremal(problem, {.M = 256});
    const double oracle = sp_from_shooting(problem, 2.0);
    MESSAGE("p = " << p << ": S = " << res.constant << " vs " << oracle << ", it " << res.iterations);
    CHECK(std::abs(res.constant / oracle - 1.0) < 1e-3);
    CHECK(res.residual <= problem.tol().residual_tol);
  }
}

TEST_CASE("non-centered problems are rejected") {
  TraceProblem raw;
  raw.r = 0.5;
  raw.R = 2.0;
  raw.center = {0.1, 0.0};
  CHECK_THROWS_AS(solve_radial_extremal(validate_problem(raw)), TraceError);
}
