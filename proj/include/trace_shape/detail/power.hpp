#pragma once

#include <cmath>

namespace trace_shape::detail {

/// (x2 + eps^2)^{p/2} - eps^p, the smoothed |x|^p (x2 = |x|^2).
inline double smoothed_power(double x2, double eps, double p) {
  if (p == 2.0) return x2;
  if (eps == 0.0) return std::pow(x2, 0.5 * p);
  return std::pow(x2 + eps * eps, 0.5 * p) - std::pow(eps, p);
}

/// p (x2 + eps^2)^{(p-2)/2}: derivative of smoothed_power with respect to x is
/// this factor times x. Zero gradient with eps = 0 yields a zero flux.
inline double flux_factor(double x2, double eps, double p) {
  if (p == 2.0) return 2.0;
  const double base = x2 + eps * eps;
  if (base == 0.0) return 0.0;
  return p * std::pow(base, 0.5 * p - 1.0);
}

/// sign(u) |u|^{e}
inline double signed_power(double u, double e) {
  if (u == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(u), e), u);
}

}  // namespace trace_shape::detail
