#include "trace_shape/kernels.hpp"

#include <cmath>

#include "trace_shape/detail/power.hpp"

namespace trace_shape::kernels {

namespace {

constexpr std::size_t kBlock = 256;

struct LocalGradient {
  double gx, gy;
};

inline LocalGradient element_gradient(const ElementGeometry& geo, std::size_t t, std::span<const double> u) {
  const auto& tri = geo.triangles[t];
  const auto& g = geo.grad[t];
  const double u0 = u[static_cast<std::size_t>(tri[0])];
  const double u1 = u[static_cast<std::size_t>(tri[1])];
  const double u2 = u[static_cast<std::size_t>(tri[2])];
  return {g[0] * u0 + g[2] * u1 + g[4] * u2, g[1] * u0 + g[3] * u1 + g[5] * u2};
}

/// Energy of one triangle and its three local gradient entries.
inline double element_numerator(const ElementGeometry& geo, std::size_t t, std::span<const double> u, double p,
                                double eps, double* local) {
  const auto& tri = geo.triangles[t];
  const auto& g = geo.grad[t];
  const double area = geo.area[t];
  const LocalGradient du = element_gradient(geo, t, u);
  const double x2 = du.gx * du.gx + du.gy * du.gy;
  double energy = area * detail::smoothed_power(x2, eps, p);
  const double flux = area * detail::flux_factor(x2, eps, p);
  if (local != nullptr) {
    for (std::size_t a = 0; a < 3; ++a) local[a] = flux * (du.gx * g[2 * a] + du.gy * g[2 * a + 1]);
  }
  const double u0 = u[static_cast<std::size_t>(tri[0])];
  const double u1 = u[static_cast<std::size_t>(tri[1])];
  const double u2 = u[static_cast<std::size_t>(tri[2])];
  const double mids[3] = {0.5 * (u0 + u1), 0.5 * (u1 + u2), 0.5 * (u2 + u0)};
  const double w = area / 3.0;
  for (std::size_t m = 0; m < 3; ++m) {
    energy += w * detail::smoothed_power(mids[m] * mids[m], eps, p);
    if (local != nullptr) {
      const double f = 0.5 * w * detail::flux_factor(mids[m] * mids[m], eps, p) * mids[m];
      local[m] += f;
      local[(m + 1) % 3] += f;
    }
  }
  return energy;
}

inline double element_volume_form(const ElementGeometry& geo, std::size_t t, std::span<const double> u, double p,
                                  const std::array<double, 4>& J) {
  const auto& tri = geo.triangles[t];
  const LocalGradient du = element_gradient(geo, t, u);
  const double x2 = du.gx * du.gx + du.gy * du.gy;
  const double u0 = u[static_cast<std::size_t>(tri[0])];
  const double u1 = u[static_cast<std::size_t>(tri[1])];
  const double u2 = u[static_cast<std::size_t>(tri[2])];
  double mass = 0.0;
  for (double m : {0.5 * (u0 + u1), 0.5 * (u1 + u2), 0.5 * (u2 + u0)}) mass += std::pow(std::abs(m), p);
  mass /= 3.0;
  const double grad_p = std::pow(x2, 0.5 * p);
  const double div = J[0] + J[3];
  // <grad u, V' grad u> with V' = [[J0, J1], [J2, J3]]
  const double quad = du.gx * (J[0] * du.gx + J[1] * du.gy) + du.gy * (J[2] * du.gx + J[3] * du.gy);
  const double weight = x2 > 0.0 ? std::pow(x2, 0.5 * p - 1.0) : 0.0;
  return geo.area[t] * ((grad_p + mass) * div - p * weight * quad);
}

}  // namespace

ElementGeometry ElementGeometry::build(const Mesh2D& mesh) {
  ElementGeometry geo;
  const std::size_t nt = mesh.triangles.size();
  geo.triangles = mesh.triangles;
  geo.area.resize(nt);
  geo.grad.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector2d& a = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Eigen::Vector2d& b = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Eigen::Vector2d& c = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const double twice = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    geo.area[t] = 0.5 * twice;
    // grad phi_a = rot90(opposite edge) / (2 area)
    geo.grad[t] = {(b.y() - c.y()) / twice, (c.x() - b.x()) / twice, (c.y() - a.y()) / twice,
                   (a.x() - c.x()) / twice, (a.y() - b.y()) / twice, (b.x() - a.x()) / twice};
  }
  const std::size_t nv = mesh.vertices.size();
  geo.incident_offset.assign(nv + 1, 0);
  for (const auto& tri : mesh.triangles) {
    for (int v : tri) ++geo.incident_offset[static_cast<std::size_t>(v) + 1];
  }
  for (std::size_t v = 0; v < nv; ++v) geo.incident_offset[v + 1] += geo.incident_offset[v];
  geo.incident.resize(3 * nt);
  std::vector<int> fill(geo.incident_offset.begin(), geo.incident_offset.end() - 1);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t a = 0; a < 3; ++a) {
      const auto v = static_cast<std::size_t>(mesh.triangles[t][a]);
      geo.incident[static_cast<std::size_t>(fill[v]++)] = static_cast<int>(3 * t + a);
    }
  }
  return geo;
}

double tree_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < static_cast<long>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    partial[static_cast<std::size_t>(b)] = s;
  }
  for (std::size_t width = 1; width < blocks; width *= 2) {
    for (std::size_t i = 0; i + width < blocks; i += 2 * width) partial[i] += partial[i + width];
  }
  return partial[0];
}

double numerator_serial(const ElementGeometry& geo, std::span<const double> u, double p, double eps,
                        std::span<double> grad) {
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  double total = 0.0;
  double local[3];
  for (std::size_t t = 0; t < geo.triangles.size(); ++t) {
    total += element_numerator(geo, t, u, p, eps, want_grad ? local : nullptr);
    if (want_grad) {
      for (std::size_t a = 0; a < 3; ++a) grad[static_cast<std::size_t>(geo.triangles[t][a])] += local[a];
    }
  }
  return total;
}

double numerator_parallel(const ElementGeometry& geo, std::span<const double> u, double p, double eps,
                          std::span<double> grad) {
  const std::size_t nt = geo.triangles.size();
  const bool want_grad = !grad.empty();
  std::vector<double> energy(nt);
  std::vector<double> local(want_grad ? 3 * nt : 0);
#pragma omp parallel for schedule(static)
  for (long t = 0; t < static_cast<long>(nt); ++t) {
    const auto ti = static_cast<std::size_t>(t);
    energy[ti] = element_numerator(geo, ti, u, p, eps, want_grad ? &local[3 * ti] : nullptr);
  }
  if (want_grad) {
    const std::size_t nv = geo.vertex_count();
#pragma omp parallel for schedule(static)
    for (long v = 0; v < static_cast<long>(nv); ++v) {
      const auto vi = static_cast<std::size_t>(v);
      double s = 0.0;
      for (int k = geo.incident_offset[vi]; k < geo.incident_offset[vi + 1]; ++k) {
        s += local[static_cast<std::size_t>(geo.incident[static_cast<std::size_t>(k)])];
      }
      grad[vi] = s;
    }
  }
  return tree_sum(energy);
}

double volume_form_serial(const ElementGeometry& geo, std::span<const double> u, double p,
                          std::span<const std::array<double, 4>> jacobians) {
  double total = 0.0;
  for (std::size_t t = 0; t < geo.triangles.size(); ++t) total += element_volume_form(geo, t, u, p, jacobians[t]);
  return total;
}

double volume_form_parallel(const ElementGeometry& geo, std::span<const double> u, double p,
                            std::span<const std::array<double, 4>> jacobians) {
  const std::size_t nt = geo.triangles.size();
  std::vector<double> contrib(nt);
#pragma omp parallel for schedule(static)
  for (long t = 0; t < static_cast<long>(nt); ++t) {
    const auto ti = static_cast<std::size_t>(t);
    contrib[ti] = element_volume_form(geo, ti, u, p, jacobians[ti]);
  }
  return tree_sum(contrib);
}

}  // namespace trace_shape::kernels
