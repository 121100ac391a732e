#include "trace_shape/deformation.hpp"

#include <cmath>
#include <numbers>

#include "trace_shape/errors.hpp"

namespace trace_shape {

namespace {

constexpr const char* kModule = "shape_deriv";
constexpr int kCircleSamples = 512;

struct Cutoff {
  double value;
  double slope;  // d/drho
};

/// 1 on [0, inner], 0 beyond outer, C^1 smoothstep in between.
Cutoff cutoff(double rho, double inner, double outer) {
  if (rho <= inner) return {1.0, 0.0};
  if (rho >= outer) return {0.0, 0.0};
  const double width = outer - inner;
  const double t = (rho - inner) / width;
  return {1.0 - t * t * (3.0 - 2.0 * t), -6.0 * t * (1.0 - t) / width};
}

struct DefaultCutoff {
  double plateau;
  double support;
};

DefaultCutoff default_cutoff(const ValidatedProblem& problem) {
  const double gap = problem.R() - problem.center_norm() - problem.r();
  return {problem.r() + 0.25 * gap, problem.r() + 0.75 * gap};
}

Eigen::Vector2d hole_center_of(const ValidatedProblem& problem) {
  return {problem.center()[0], problem.center()[1]};
}

}  // namespace

DeformationField::DeformationField(Eigen::Vector2d hole_center, double hole_radius)
    : hole_center_(std::move(hole_center)), hole_radius_(hole_radius) {}

Eigen::Vector2d DeformationField::value(const Eigen::Vector2d& x) const {
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (const Atom& a : atoms_) {
    const Eigen::Vector2d d = x - a.origin;
    const double rho = d.norm();
    const Cutoff c = cutoff(rho, a.inner, a.outer);
    if (c.value == 0.0) continue;
    if (a.family == FieldFamily::HoleNormal) {
      if (rho > 0.0) v += a.weight * c.value * d / rho;
    } else {
      v += a.weight * c.value * a.direction;
    }
  }
  return v;
}

Eigen::Matrix2d DeformationField::jacobian(const Eigen::Vector2d& x) const {
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (const Atom& a : atoms_) {
    const Eigen::Vector2d d = x - a.origin;
    const double rho = d.norm();
    if (rho == 0.0) continue;
    const Cutoff c = cutoff(rho, a.inner, a.outer);
    if (c.value == 0.0 && c.slope == 0.0) continue;
    const Eigen::Vector2d n = d / rho;
    if (a.family == FieldFamily::HoleNormal) {
      J += a.weight * (c.slope * n * n.transpose() +
                       c.value * (Eigen::Matrix2d::Identity() - n * n.transpose()) / rho);
    } else {
      J += a.weight * c.slope * a.direction * n.transpose();
    }
  }
  return J;
}

double DeformationField::hole_flux() const {
  double sum = 0.0;
  const double dtheta = 2.0 * std::numbers::pi / kCircleSamples;
  for (int k = 0; k < kCircleSamples; ++k) {
    const double theta = k * dtheta;
    const Eigen::Vector2d n(std::cos(theta), std::sin(theta));
    // nu points into the hole
    sum += -value(hole_center_ + hole_radius_ * n).dot(n);
  }
  return sum * hole_radius_ * dtheta;
}

double DeformationField::hole_normal_rms() const {
  double sum = 0.0;
  for (int k = 0; k < kCircleSamples; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / kCircleSamples;
    const Eigen::Vector2d n(std::cos(theta), std::sin(theta));
    const double vn = value(hole_center_ + hole_radius_ * n).dot(n);
    sum += vn * vn;
  }
  return std::sqrt(sum / kCircleSamples);
}

double DeformationField::support_radius() const {
  double out = 0.0;
  for (const Atom& a : atoms_) out = std::max(out, a.origin.norm() + a.outer);
  return out;
}

DeformationField& DeformationField::operator+=(const DeformationField& other) {
  atoms_.insert(atoms_.end(), other.atoms_.begin(), other.atoms_.end());
  return *this;
}

DeformationField& DeformationField::operator*=(double a) {
  for (Atom& atom : atoms_) atom.weight *= a;
  return *this;
}

DeformationField operator+(DeformationField a, const DeformationField& b) { return a += b; }
DeformationField operator*(double s, DeformationField v) { return v *= s; }

DeformationField make_deformation_field(const ValidatedProblem& problem, const FieldSpec& spec) {
  if (problem.N() != 2) throw TraceError(ErrorKind::GeometryInvalid, kModule, "deformation fields are 2-D only");
  const Eigen::Vector2d c = hole_center_of(problem);
  DeformationField field(c, problem.r());
  const DefaultCutoff def = default_cutoff(problem);

  switch (spec.family) {
    case FieldFamily::Translation:
    case FieldFamily::HoleNormal: {
      const double a = spec.plateau.value_or(def.plateau);
      const double b = spec.support.value_or(def.support);
      if (!(a > problem.r()) || !(b > a) || !(c.norm() + b < problem.R())) {
        throw TraceError(ErrorKind::GeometryInvalid, kModule,
                         "cutoff needs r < plateau < support and |c| + support < R");
      }
      Eigen::Vector2d dir = spec.direction;
      if (spec.family == FieldFamily::Translation) {
        if (!(dir.norm() > 0.0)) throw TraceError(ErrorKind::GeometryInvalid, kModule, "zero direction");
        dir.normalize();
      }
      field.add_atom({spec.family, 1.0, dir, c, a, b});
      break;
    }
    case FieldFamily::RadialBump: {
      const double lo = spec.bump_inner, hi = spec.bump_outer;
      if (!(lo >= 0.0) || !(hi > lo) || !(spec.bump_center.norm() + hi < problem.R())) {
        throw TraceError(ErrorKind::GeometryInvalid, kModule,
                         "bump needs 0 <= inner < outer and |center| + outer < R");
      }
      field.add_atom({FieldFamily::RadialBump, 1.0, spec.direction, spec.bump_center, lo, hi});
      break;
    }
  }
  if (spec.volume_preserving) field = project_volume_preserving(problem, std::move(field));
  return field;
}

DeformationField project_volume_preserving(const ValidatedProblem& problem, DeformationField field) {
  const DefaultCutoff def = default_cutoff(problem);
  const double flux = field.hole_flux();
  // the unit hole-normal field has flux -2 pi r
  const double k = flux / (2.0 * std::numbers::pi * problem.r());
  if (k != 0.0) {
    field.add_atom({FieldFamily::HoleNormal, k, Eigen::Vector2d::Zero(), hole_center_of(problem), def.plateau,
                    def.support});
  }
  return field;
}

}  // namespace trace_shape
