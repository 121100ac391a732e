#include <cmath>
#include <limits>

#include "doctest.h"
#include "trace_shape/errors.hpp"
#include "trace_shape/problem.hpp"

using namespace trace_shape;

namespace {

ErrorKind kind_of(const TraceProblem& raw) {
  try {
    validate_problem(raw);
  } catch (const TraceError& e) {
    return e.kind();
  }
  FAIL("expected a TraceError");
  return ErrorKind::ConfigError;
}

}  // namespace

TEST_CASE("valid annulus passes and is padded to the origin") {
  TraceProblem raw;
  raw.r = 0.5;
  raw.R = 1.0;
  const auto v = validate_problem(raw);
  CHECK(v.center() == std::vector<double>{0.0, 0.0});
  CHECK(v.centered());
  CHECK(std::isinf(v.critical_exponent()));
  CHECK(validate_problem(v) == v);
}

TEST_CASE("invalid problems are rejected with the right kind") {
  TraceProblem raw;
  raw.N = 3;
  raw.q = 4.0;
  CHECK(kind_of(raw) == ErrorKind::ExponentOutOfRange);

  raw = {};
  raw.r = 1.0;
  raw.R = 0.5;
  CHECK(kind_of(raw) == ErrorKind::GeometryInvalid);

  raw = {};
  raw.center = {0.5, 0.0};
  CHECK(kind_of(raw) == ErrorKind::GeometryInvalid);

  raw = {};
  raw.q = 1.0;
  CHECK(kind_of(raw) == ErrorKind::ExponentOutOfRange);

  raw = {};
  raw.tolerances.residual_tol = 0.0;
  CHECK(kind_of(raw) == ErrorKind::BadTolerance);

  raw = {};
  raw.tolerances.fd_step_min = 1e-2;
  raw.tolerances.fd_step_max = 1e-3;
  CHECK(kind_of(raw) == ErrorKind::BadTolerance);
}

TEST_CASE("critical exponent") {
  CHECK(critical_exponent(2.0, 3) == doctest::Approx(4.0));
  CHECK(std::isinf(critical_exponent(2.0, 2)));
  CHECK(critical_exponent(1.5, 3) < critical_exponent(2.0, 3));
  CHECK(critical_exponent(2.5, 3) > critical_exponent(2.0, 3));
}

TEST_CASE("sphere measure") {
  CHECK(sphere_measure(2, 1.0) == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
  CHECK(sphere_measure(3, 2.0) == doctest::Approx(16.0 * M_PI).epsilon(1e-15));
  CHECK(sphere_measure(4, 3.0) == doctest::Approx(27.0 * sphere_measure(4, 1.0)).epsilon(1e-14));
}

TEST_CASE("error messages carry the module and kind") {
  const TraceError e(ErrorKind::ZeroTrace, "radial", "boom");
  CHECK(std::string(e.what()) == "radial: ZeroTrace: boom");
  CHECK(is_validation_error(ErrorKind::GeometryInvalid));
  CHECK_FALSE(is_validation_error(ErrorKind::NoConvergence));
}
