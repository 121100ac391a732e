#pragma once

#include <array>
#include <span>
#include <vector>

#include "trace_shape/mesh2d.hpp"

// P1 element kernels on a Mesh2D. Each kernel exists in a serial reference
// form and an OpenMP form. The OpenMP form writes per-element contributions
// and reduces them in an order that does not depend on the thread count, so
// its output is bit-identical for any number of threads; it differs from the
// serial reference only by summation order.
namespace trace_shape::kernels {

/// Per-triangle areas and constant basis gradients, plus vertex -> incident
/// (triangle, local index) lists in ascending triangle order.
struct ElementGeometry {
  std::vector<std::array<int, 3>> triangles;
  std::vector<double> area;
  std::vector<std::array<double, 6>> grad;  // (dphi_a/dx, dphi_a/dy) for a = 0, 1, 2
  std::vector<int> incident_offset;         // size vertices + 1
  std::vector<int> incident;                // 3 * triangle + local index

  static ElementGeometry build(const Mesh2D& mesh);
  std::size_t vertex_count() const { return incident_offset.size() - 1; }
};

/// Numerator of the trace quotient with smoothed powers:
///   sum_T area (|grad u|^2 + eps^2)^{p/2} - eps^p
///   + sum_T area/3 sum_{edge midpoints m} (u_m^2 + eps^2)^{p/2} - eps^p.
/// Fills grad when non-empty.
double numerator_serial(const ElementGeometry& geo, std::span<const double> u, double p, double eps,
                        std::span<double> grad);
double numerator_parallel(const ElementGeometry& geo, std::span<const double> u, double p, double eps,
                          std::span<double> grad);

/// Per-element shape-derivative integrand
///   (|grad u|^p + |u|^p) div V - p |grad u|^{p-2} <grad u, V' grad u>
/// with V' and div V supplied per triangle (evaluated at centroids).
double volume_form_serial(const ElementGeometry& geo, std::span<const double> u, double p,
                          std::span<const std::array<double, 4>> jacobians);
double volume_form_parallel(const ElementGeometry& geo, std::span<const double> u, double p,
                            std::span<const std::array<double, 4>> jacobians);

/// Pairwise sum over fixed 256-element blocks; independent of thread count.
double tree_sum(std::span<const double> values);

}  // namespace trace_shape::kernels
