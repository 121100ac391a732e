#include <cmath>

#include "doctest.h"
#include "trace_shape/errors.hpp"
#include "trace_shape/fem2d.hpp"
#include "trace_shape/hole_opt.hpp"
#include "trace_shape/sp_ode.hpp"

using namespace trace_shape;

namespace {

ValidatedProblem annulus(double q) {
  TraceProblem raw;
  raw.p = 2.0;
  raw.q = q;
  raw.r = 1.0;
  raw.R = 2.0;
  return validate_problem(raw);
}

double threshold() { return q_threshold(integrate_sp_ode(2.0, 2, 1.0, 2.0), 2.0); }

}  // namespace

TEST_CASE("sweep above the threshold breaks the symmetry") {
  const auto problem = annulus(1.2 * threshold());
  const MeshResolution res{32, 64};
  const SweepReport rep = sweep_center(problem, {}, res);
  REQUIRE(rep.offsets.size() == 5);
  CHECK(rep.offsets[2] == 0.0);
  CHECK(rep.constants[1] < rep.constants[2]);
  CHECK(rep.constants[3] < rep.constants[2]);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(rep.constants[i] - rep.constants[4 - i]) < 1e-12);
  CHECK(rep.h2_numeric < 0.0);
  CHECK(rep.h2_closed < 0.0);
  CHECK(rep.q > rep.Q);

  const double fresh = solve_trace_extremal_2d(
                           std::make_shared<const Mesh2D>(generate_annular_mesh(problem, res.layers, res.angular)),
                           problem)
                           .constant;
  CHECK(rep.constants[2] == fresh);
}

TEST_CASE("translated extremal reproduces the closed-form second derivative") {
  for (double factor : {0.8, 1.2}) {
    const auto problem = annulus(factor * threshold());
    const double closed = h2_closed_form(integrate_sp_ode(2.0, 2, 1.0, 2.0), problem);
    const double oracle = h2_translated_extremal(problem, {}, {128, 256});
    CHECK(std::abs(oracle / closed - 1.0) < 0.02);
  }
}

TEST_CASE("sweep below the threshold keeps the centered hole") {
  const SweepReport rep = sweep_center(annulus(0.8 * threshold()), {}, {32, 64});
  CHECK(rep.h2_numeric > 0.0);
  CHECK(rep.h2_closed > 0.0);
}

TEST_CASE("sweep offsets are validated") {
  const auto problem = annulus(2.0);
  CHECK_THROWS_AS(sweep_center(problem, {-0.01, 0.0, 0.02}), TraceError);
  CHECK_THROWS_AS(sweep_center(problem, {-0.01, 0.01, -0.02, 0.02}), TraceError);
}

TEST_CASE("criticality of the centered hole") {
  for (double q : {1.5, 2.0}) {
    const auto problem = annulus(q);
    const auto fields = criticality_fields(problem, 3, 7);
    REQUIRE(fields.size() == 5);
    const double coarse = criticality_check(problem, fields, {16, 64});
    const double fine = criticality_check(problem, fields, {32, 128});
    MESSAGE("q = " << q << ": " << coarse << " -> " << fine);
    CHECK(fine <= 1e-2);
    CHECK(fine < coarse);
  }
}

TEST_CASE("criticality rejects volume-changing fields") {
  const auto problem = annulus(2.0);
  const DeformationField inflate = make_deformation_field(problem, {.family = FieldFamily::HoleNormal});
  CHECK_THROWS_AS(criticality_check(problem, {inflate}, {8, 32}), TraceError);
  TraceProblem raw = problem.raw();
  raw.q = 2.5;
  CHECK_THROWS_AS(criticality_check(validate_problem(raw), {}, {8, 32}), TraceError);
}

TEST_CASE("center optimizer moves outward above the threshold") {
  const auto problem = annulus(1.2 * threshold());
  OptimizeOptions opts;
  opts.max_iter = 4;
  opts.resolution = {16, 64};
  const CenterTrajectory a = optimize_center(problem, {0.05, 0.0}, opts);
  REQUIRE(a.iterates.size() >= 2);
  for (std::size_t i = 1; i < a.iterates.size(); ++i) {
    CHECK(a.iterates[i].value < a.iterates[i - 1].value);
    CHECK(a.iterates[i].center[0] > a.iterates[i - 1].center[0]);
    CHECK(std::hypot(a.iterates[i].center[0], a.iterates[i].center[1]) <= 0.5 + 1e-12);
  }
  // a quarter turn maps the mesh onto itself
  const CenterTrajectory b = optimize_center(problem, {0.0, 0.05}, opts);
  REQUIRE(b.iterates.size() == a.iterates.size());
  for (std::size_t i = 0; i < a.iterates.size(); ++i) {
    CHECK(std::abs(a.iterates[i].value - b.iterates[i].value) < 1e-9 * a.iterates[i].value);
  }
  CHECK_THROWS_AS(optimize_center(problem, {0.6, 0.0}, opts), TraceError);
}
