#include "trace_shape/hole_opt.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <numbers>
#include <random>

#include "trace_shape/errors.hpp"
#include "trace_shape/fem2d.hpp"
#include "trace_shape/log.hpp"
#include "trace_shape/parallel.hpp"
#include "trace_shape/radial.hpp"
#include "trace_shape/shape_deriv.hpp"
#include "trace_shape/sp_ode.hpp"

namespace trace_shape {

namespace {

constexpr const char* kModule = "hole_opt";

void require_planar(const ValidatedProblem& problem) {
  if (problem.N() != 2) throw TraceError(ErrorKind::GeometryInvalid, kModule, "hole optimization is 2-D only");
}

std::shared_ptr<const Mesh2D> mesh_for(const ValidatedProblem& problem, const MeshResolution& res) {
  return std::make_shared<const Mesh2D>(generate_annular_mesh(problem, res.layers, res.angular));
}

struct Evaluation {
  double value = 0.0;
  std::array<double, 2> gradient{};
};

Evaluation evaluate_center(const ValidatedProblem& base, std::array<double, 2> c, const MeshResolution& res) {
  const ValidatedProblem problem = base.with_center({c[0], c[1]});
  const TraceResult sol = solve_trace_extremal_2d(mesh_for(problem, res), problem);
  Evaluation e;
  e.value = sol.constant;
  for (int i = 0; i < 2; ++i) {
    FieldSpec spec;
    spec.direction = i == 0 ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 1.0);
    e.gradient[static_cast<std::size_t>(i)] =
        shape_derivative(sol, make_deformation_field(problem, spec), problem.p(), problem.q()).volume_form;
  }
  return e;
}

void check_offsets(const ValidatedProblem& problem, std::vector<double>& offsets, std::vector<double>& positive) {
  std::sort(offsets.begin(), offsets.end());
  bool has_zero = false;
  for (double t : offsets) {
    if (t == 0.0) has_zero = true;
    if (t > 0.0) positive.push_back(t);
    if (std::find(offsets.begin(), offsets.end(), -t) == offsets.end()) {
      throw TraceError(ErrorKind::OutOfRange, kModule, "offsets must be symmetric about 0");
    }
    if (!(std::abs(t) + problem.r() < problem.R())) {
      throw TraceError(ErrorKind::GeometryInvalid, kModule, "offset moves the hole outside the domain");
    }
  }
  if (!has_zero || positive.size() < 2) {
    throw TraceError(ErrorKind::OutOfRange, kModule, "offsets need 0 and at least two positive values");
  }
}

// fits S(t) = S(0) + c2 t^2 + c4 t^4 through the symmetric averages at the two
// smallest positive offsets and returns 2 c2
double even_second_derivative(const std::vector<double>& offsets, const std::vector<double>& values,
                              const std::vector<double>& positive) {
  auto at = [&](double t) {
    return values[static_cast<std::size_t>(std::find(offsets.begin(), offsets.end(), t) - offsets.begin())];
  };
  const double a = positive[0], b = positive[1], s0 = at(0.0);
  const double ya = 0.5 * (at(a) + at(-a)) - s0;
  const double yb = 0.5 * (at(b) + at(-b)) - s0;
  const double c2 = (ya * b * b * b * b - yb * a * a * a * a) / (a * a * b * b * (b * b - a * a));
  return 2.0 * c2;
}

}  // namespace

std::vector<double> default_sweep_offsets(const ValidatedProblem& problem) {
  const double L = problem.R() - problem.r();
  return {-0.02 * L, -0.01 * L, 0.0, 0.01 * L, 0.02 * L};
}

SweepReport sweep_center(const ValidatedProblem& problem, std::vector<double> offsets,
                         const MeshResolution& resolution) {
  require_planar(problem);
  if (!problem.centered()) throw TraceError(ErrorKind::GeometryInvalid, kModule, "sweeps start from a centered hole");
  if (offsets.empty()) offsets = default_sweep_offsets(problem);
  std::vector<double> positive;
  check_offsets(problem, offsets, positive);

  SweepReport report;
  report.offsets = offsets;
  report.constants.assign(offsets.size(), 0.0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_threads())
  for (long k = 0; k < static_cast<long>(offsets.size()); ++k) {
    try {
      const auto kk = static_cast<std::size_t>(k);
      const ValidatedProblem moved = problem.with_center({offsets[kk], 0.0});
      report.constants[kk] = solve_trace_extremal_2d(mesh_for(moved, resolution), moved).constant;
    } catch (...) {
#pragma omp critical(trace_shape_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  report.h2_numeric = even_second_derivative(offsets, report.constants, positive);

  const SpCurve curve = integrate_sp_ode(problem.p(), problem.N(), problem.r(), problem.R(),
                                         {.ode_tol = problem.tol().ode_tol});
  report.h2_closed = h2_closed_form(curve, problem);
  report.Q = q_threshold(curve, problem.R());
  report.q = problem.q();
  return report;
}

double h2_translated_extremal(const ValidatedProblem& problem, std::vector<double> offsets,
                              const MeshResolution& resolution) {
  require_planar(problem);
  if (!problem.centered()) throw TraceError(ErrorKind::GeometryInvalid, kModule, "sweeps start from a centered hole");
  if (offsets.empty()) offsets = default_sweep_offsets(problem);
  std::vector<double> positive;
  check_offsets(problem, offsets, positive);
  const double reach = problem.R() + offsets.back();
  const RadialProfile u0 =
      shoot_radial_ivp(problem.N(), problem.p(), problem.r(), reach, 1.0, problem.tol().ode_tol, 16384);
  std::vector<double> values(offsets.size());
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const ValidatedProblem moved = problem.with_center({offsets[k], 0.0});
    const ScalarField field = interpolate_radial(mesh_for(moved, resolution), u0, Eigen::Vector2d(offsets[k], 0.0));
    values[k] = rayleigh_quotient_2d(field, problem.p(), problem.q());
  }
  return even_second_derivative(offsets, values, positive);
}

CenterTrajectory optimize_center(const ValidatedProblem& problem, std::array<double, 2> init_center,
                                 const OptimizeOptions& options) {
  require_planar(problem);
  const double L = problem.R() - problem.r();
  const double radius = options.margin * L;
  auto norm = [](std::array<double, 2> v) { return std::hypot(v[0], v[1]); };
  if (!(norm(init_center) < radius)) {
    throw TraceError(ErrorKind::Infeasible, kModule, "initial center must satisfy |c| < margin (R - r)");
  }
  auto project = [&](std::array<double, 2> c) {
    const double n = norm(c);
    if (n > radius) {
      c[0] *= radius / n;
      c[1] *= radius / n;
    }
    return c;
  };

  CenterTrajectory traj;
  std::array<double, 2> c = init_center;
  Evaluation cur = evaluate_center(problem, c, options.resolution);
  traj.iterates.push_back({c, cur.value, cur.gradient});
  double step = 0.1 * L / std::max(norm(cur.gradient), 1e-300);
  for (int it = 0; it < options.max_iter; ++it) {
    const double gnorm = norm(cur.gradient);
    if (gnorm <= options.gradient_tol * cur.value / L) {
      traj.converged = true;
      break;
    }
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      const std::array<double, 2> trial = project({c[0] - step * cur.gradient[0], c[1] - step * cur.gradient[1]});
      const double decrease = cur.gradient[0] * (c[0] - trial[0]) + cur.gradient[1] * (c[1] - trial[1]);
      if (decrease <= 0.0) break;
      Evaluation next;
      try {
        next = evaluate_center(problem, trial, options.resolution);
      } catch (const TraceError& e) {
        if (e.kind() != ErrorKind::QualityFailure) throw;
        step *= 0.5;
        continue;
      }
      if (next.value <= cur.value - 1e-4 * decrease) {
        c = trial;
        cur = next;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      traj.margin_active = norm(c) >= radius * (1.0 - 1e-12);
      traj.converged = !traj.margin_active;
      break;
    }
    traj.iterates.push_back({c, cur.value, cur.gradient});
    log().debug("optimize_center it {}: c = ({}, {}), S = {}", it, c[0], c[1], cur.value);
    if (norm(c) >= radius * (1.0 - 1e-12)) {
      // stop once the gradient pushes against the margin
      const double outward = (cur.gradient[0] * c[0] + cur.gradient[1] * c[1]) / norm(c);
      if (outward < 0.0) {
        traj.margin_active = true;
        break;
      }
    }
    step *= 2.0;
  }
  if (!traj.converged && !traj.margin_active && traj.iterates.size() > 1 &&
      static_cast<int>(traj.iterates.size()) > options.max_iter) {
    throw TraceError(ErrorKind::NoConvergence, kModule, "iteration budget exhausted");
  }
  return traj;
}

double criticality_check(const ValidatedProblem& problem, const std::vector<DeformationField>& fields,
                         const MeshResolution& resolution) {
  require_planar(problem);
  if (!problem.centered()) throw TraceError(ErrorKind::GeometryInvalid, kModule, "criticality needs a centered hole");
  if (problem.q() > problem.p()) throw TraceError(ErrorKind::ExponentOutOfRange, kModule, "criticality needs q <= p");
  for (const auto& f : fields) {
    const double scale = 2.0 * std::numbers::pi * problem.r() * std::max(f.hole_normal_rms(), 1.0);
    if (std::abs(f.hole_flux()) > 1e-10 * scale) {
      throw TraceError(ErrorKind::NotVolumePreserving, kModule,
                       "field has hole flux " + std::to_string(f.hole_flux()));
    }
  }
  const TraceResult sol = solve_trace_extremal_2d(mesh_for(problem, resolution), problem);
  double worst = 0.0;
  for (const auto& f : fields) {
    const double amplitude = f.hole_normal_rms();
    if (!(amplitude > 0.0)) continue;
    const double d = shape_derivative(sol, f, problem.p(), problem.q()).volume_form;
    worst = std::max(worst, std::abs(d) / (sol.constant * amplitude));
  }
  return worst;
}

std::vector<DeformationField> criticality_fields(const ValidatedProblem& problem, int random_count,
                                                 unsigned long long seed) {
  std::vector<DeformationField> fields;
  FieldSpec e1, e2, normal;
  e2.direction = {0.0, 1.0};
  normal.family = FieldFamily::HoleNormal;
  fields.push_back(make_deformation_field(problem, e1));
  fields.push_back(make_deformation_field(problem, e2));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double r = problem.r();
  const double gap = problem.R() - problem.center_norm() - r;
  for (int k = 0; k < random_count; ++k) {
    DeformationField f = unit(rng) * fields[0] + unit(rng) * fields[1];
    f += unit(rng) * make_deformation_field(problem, normal);
    for (int b = 0; b < 2; ++b) {
      const double theta = angle(rng);
      FieldSpec bump;
      bump.family = FieldFamily::RadialBump;
      bump.direction = Eigen::Vector2d(unit(rng), unit(rng));
      bump.bump_center = Eigen::Vector2d(problem.center()[0], problem.center()[1]) +
                         r * Eigen::Vector2d(std::cos(theta), std::sin(theta));
      bump.bump_inner = 0.1 * gap;
      bump.bump_outer = 0.5 * gap;
      f += make_deformation_field(problem, bump);
    }
    fields.push_back(project_volume_preserving(problem, std::move(f)));
  }
  return fields;
}

}  // namespace trace_shape
