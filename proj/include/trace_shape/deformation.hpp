#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "trace_shape/problem.hpp"

namespace trace_shape {

enum class FieldFamily { Translation, HoleNormal, RadialBump };

/// Request for make_deformation_field. Lengths are absolute; unset cutoff radii
/// default to r + gap/4 (plateau) and r + 3 gap/4 (support) with
/// gap = R - |c| - r, both measured from the hole center.
struct FieldSpec {
  FieldFamily family = FieldFamily::Translation;
  Eigen::Vector2d direction{1.0, 0.0};
  Eigen::Vector2d bump_center{0.0, 0.0};
  double bump_inner = 0.0;
  double bump_outer = 0.0;
  std::optional<double> plateau;
  std::optional<double> support;
  bool volume_preserving = false;
};

/// A smooth compactly supported vector field on the plane, stored as a linear
/// combination of cutoff atoms so that sums and multiples stay exact:
///   Translation   w d chi(|x - c|)
///   HoleNormal    w chi(|x - c|) (x - c)/|x - c|   (inflates the hole)
///   RadialBump    w d beta(|x - x0|)
/// chi and beta are C^1 smoothstep cutoffs equal to 1 on their plateau.
class DeformationField {
 public:
  struct Atom {
    FieldFamily family;
    double weight;
    Eigen::Vector2d direction;
    Eigen::Vector2d origin;  // hole center or bump center
    double inner;            // plateau radius
    double outer;            // support radius
  };

  DeformationField(Eigen::Vector2d hole_center, double hole_radius);

  Eigen::Vector2d value(const Eigen::Vector2d& x) const;
  /// J(i, j) = dV_i / dx_j
  Eigen::Matrix2d jacobian(const Eigen::Vector2d& x) const;
  double divergence(const Eigen::Vector2d& x) const { return jacobian(x).trace(); }

  /// Integral of <V, nu> over the hole circle, nu pointing into the hole
  /// (exterior normal of the solid region); trapezoid rule, exact for the
  /// trigonometric content of these fields up to round-off.
  double hole_flux() const;
  /// RMS of <V, nu> over the hole circle.
  double hole_normal_rms() const;
  /// Largest |x| where the field can be nonzero.
  double support_radius() const;

  const std::vector<Atom>& atoms() const { return atoms_; }
  const Eigen::Vector2d& hole_center() const { return hole_center_; }
  double hole_radius() const { return hole_radius_; }

  void add_atom(const Atom& atom) { atoms_.push_back(atom); }
  DeformationField& operator+=(const DeformationField& other);
  DeformationField& operator*=(double a);

 private:
  Eigen::Vector2d hole_center_;
  double hole_radius_;
  std::vector<Atom> atoms_;
};

DeformationField operator+(DeformationField a, const DeformationField& b);
DeformationField operator*(double s, DeformationField v);

/// Builds the requested field for the problem's hole (N = 2). Throws
/// GeometryInvalid when the plateau does not cover the hole or the support
/// reaches the outer boundary.
DeformationField make_deformation_field(const ValidatedProblem& problem, const FieldSpec& spec);

/// Adds a multiple of the hole-normal field (with the problem's default
/// cutoff) so that the hole flux vanishes.
DeformationField project_volume_preserving(const ValidatedProblem& problem, DeformationField field);

}  // namespace trace_shape
